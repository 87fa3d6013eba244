#include "consecrm/instance_io.hpp"

#include <fstream>
#include <set>

#include "json.hpp"

namespace consecrm {

namespace {

using nlohmann::json;

void reject_unknown_fields(const json& obj, const std::set<std::string>& allowed,
                           const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key()))
      fail(Errc::bad_input, "unknown field \"" + it.key() + "\" in " + where);
}

}  // namespace

std::string to_json_string(const Instance& instance, int indent) {
  json requests = json::array();
  const bool choice = instance.scenario == Scenario::choice_based;
  for (const RequestType& r : instance.requests) {
    json req{{"p", r.p}, {"l", r.interval.lo}, {"r", r.interval.hi}, {"w", r.rewards}};
    if (choice) {
      req["v"] = r.attractions;
      req["v0"] = r.outside_attraction;
    }
    requests.push_back(std::move(req));
  }
  json doc{{"scenario", to_string(instance.scenario)},
           {"M", instance.resource_count},
           {"N", instance.slot_count},
           {"T", instance.horizon},
           {"requests", std::move(requests)}};
  return doc.dump(indent);
}

Instance instance_from_json_string(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    fail(Errc::bad_input, std::string("instance JSON parse error: ") + e.what());
  }
  if (!doc.is_object()) fail(Errc::bad_input, "instance JSON must be an object");
  reject_unknown_fields(doc, {"scenario", "M", "N", "T", "requests"}, "instance");
  for (const char* key : {"scenario", "M", "N", "T", "requests"})
    if (!doc.contains(key)) fail(Errc::bad_input, std::string("missing field \"") + key + "\"");

  Instance instance;
  const std::string scenario = doc["scenario"].get<std::string>();
  if (scenario == "reject")
    instance.scenario = Scenario::reject_or_accept;
  else if (scenario == "choice")
    instance.scenario = Scenario::choice_based;
  else
    fail(Errc::bad_input, "scenario must be \"reject\" or \"choice\", got \"" + scenario + "\"");

  instance.resource_count = doc["M"].get<int>();
  instance.slot_count = doc["N"].get<int>();
  instance.horizon = doc["T"].get<int>();
  if (!doc["requests"].is_array()) fail(Errc::bad_input, "requests must be an array");

  const bool choice = instance.scenario == Scenario::choice_based;
  std::size_t index = 0;
  for (const json& req : doc["requests"]) {
    const std::string where = "requests[" + std::to_string(index++) + "]";
    if (!req.is_object()) fail(Errc::bad_input, where + " must be an object");
    std::set<std::string> allowed{"p", "l", "r", "w"};
    if (choice) {
      allowed.insert("v");
      allowed.insert("v0");
    }
    reject_unknown_fields(req, allowed, where);
    for (const char* key : {"p", "l", "r", "w"})
      if (!req.contains(key)) fail(Errc::bad_input, where + " missing field \"" + key + "\"");

    RequestType r;
    r.p = req["p"].get<double>();
    r.interval = Interval{req["l"].get<int>(), req["r"].get<int>()};
    r.rewards = req["w"].get<std::vector<double>>();
    if (choice) {
      if (!req.contains("v") || !req.contains("v0"))
        fail(Errc::bad_input, where + " missing \"v\"/\"v0\" on a choice instance");
      r.attractions = req["v"].get<std::vector<double>>();
      r.outside_attraction = req["v0"].get<double>();
    }
    instance.requests.push_back(std::move(r));
  }
  return instance;
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::bad_input, "cannot open instance file " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return instance_from_json_string(text);
}

void save_instance(const Instance& instance, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(Errc::bad_input, "cannot write instance file " + path);
  out << to_json_string(instance) << "\n";
}

}  // namespace consecrm
