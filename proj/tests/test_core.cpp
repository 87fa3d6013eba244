#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>

#include "consecrm/core.hpp"
#include "consecrm/generate.hpp"
#include "consecrm/instance_io.hpp"

using namespace consecrm;

namespace {

Instance small_reject_instance() {
  Instance instance;
  instance.scenario = Scenario::reject_or_accept;
  instance.resource_count = 2;
  instance.slot_count = 4;
  instance.horizon = 2;
  instance.requests = {
      RequestType{0.5, Interval{1, 2}, {3.0, 4.0}, {}, 0.0},
      RequestType{1.0, Interval{2, 4}, {2.0, 1.0}, {}, 0.0},
  };
  return instance;
}

}  // namespace

TEST_CASE("interval basics") {
  CHECK(Interval{1, 0}.is_empty());
  CHECK(Interval::empty() == Interval{5, 2});
  CHECK(Interval{2, 5}.contains(Interval{3, 4}));
  CHECK(Interval{2, 5}.contains(Interval{2, 5}));
  CHECK(!Interval{2, 5}.contains(Interval{1, 3}));
  CHECK(Interval{2, 5}.contains(Interval::empty()));
  CHECK(Interval{3, 3}.length() == 1);
}

TEST_CASE("interval index round trip") {
  for (int n = 1; n <= 8; ++n) {
    int expected = 0;
    for (int a = 1; a <= n; ++a)
      for (int b = a; b <= n; ++b) {
        const Interval iv{a, b};
        CHECK(interval_index(n, iv) == expected);
        CHECK(interval_at(n, expected) == iv);
        ++expected;
      }
    CHECK(expected == interval_count(n));
  }
}

TEST_CASE("maximal sequences") {
  CHECK(maximal_sequences(SlotState::from_string("110110")) ==
        std::vector<Interval>{{1, 2}, {4, 5}});
  CHECK(maximal_sequences(SlotState::from_string("111111")) == std::vector<Interval>{{1, 6}});
  CHECK(maximal_sequences(SlotState::from_string("000000")).empty());
  CHECK(maximal_sequences(SlotState::from_string("1")) == std::vector<Interval>{{1, 1}});
  CHECK(maximal_sequences(SlotState::from_string("101")) ==
        std::vector<Interval>{{1, 1}, {3, 3}});
}

TEST_CASE("allocate") {
  CHECK(allocate(SlotState::from_string("111111"), Interval{3, 4}).to_string() == "110011");
  CHECK(allocate(SlotState::from_string("110110"), Interval{4, 5}).to_string() == "110000");
  CHECK_THROWS_AS(allocate(SlotState::from_string("110110"), Interval{2, 3}), Error);
  try {
    allocate(SlotState::from_string("110110"), Interval{2, 3});
  } catch (const Error& e) {
    CHECK(e.code() == Errc::occupied_slot);
  }
  // Empty interval is a no-op.
  CHECK(allocate(SlotState::from_string("10"), Interval::empty()).to_string() == "10");
}

TEST_CASE("split effect") {
  CHECK(split_effect(Interval{1, 6}, Interval{3, 4}) ==
        std::pair<Interval, Interval>{{1, 2}, {5, 6}});
  const auto [left, right] = split_effect(Interval{2, 5}, Interval{2, 5});
  CHECK(left.is_empty());
  CHECK(right.is_empty());
  const auto [l2, r2] = split_effect(Interval{1, 4}, Interval{1, 2});
  CHECK(l2.is_empty());
  CHECK(r2 == Interval{3, 4});
  CHECK_THROWS_AS(split_effect(Interval{2, 4}, Interval{1, 2}), Error);
}

TEST_CASE("maximal sequences partition availability and are non-adjacent") {
  for (int n = 1; n <= 8; ++n) {
    for (std::size_t bits = 0; bits < (std::size_t{1} << n); ++bits) {
      SlotState state(n, false);
      for (int s = 1; s <= n; ++s)
        if (bits & (std::size_t{1} << (s - 1))) state.set(s, true);
      const auto seqs = maximal_sequences(state);
      std::set<int> covered;
      for (const Interval& iv : seqs)
        for (int s = iv.lo; s <= iv.hi; ++s) covered.insert(s);
      CHECK(static_cast<int>(covered.size()) == state.available_count());
      for (int s : covered) CHECK(state.available(s));
      for (std::size_t i = 1; i < seqs.size(); ++i) CHECK(seqs[i].lo >= seqs[i - 1].hi + 2);
    }
  }
}

TEST_CASE("allocate agrees with split_effect, exhaustively for N <= 8") {
  for (int n = 1; n <= 8; ++n) {
    for (std::size_t bits = 0; bits < (std::size_t{1} << n); ++bits) {
      SlotState state(n, false);
      for (int s = 1; s <= n; ++s)
        if (bits & (std::size_t{1} << (s - 1))) state.set(s, true);
      const auto seqs = maximal_sequences(state);
      for (const Interval& seq : seqs) {
        for (int c = seq.lo; c <= seq.hi; ++c)
          for (int d = c; d <= seq.hi; ++d) {
            const auto [left, right] = split_effect(seq, Interval{c, d});
            std::vector<Interval> expected;
            for (const Interval& other : seqs) {
              if (other == seq) {
                if (!left.is_empty()) expected.push_back(left);
                if (!right.is_empty()) expected.push_back(right);
              } else {
                expected.push_back(other);
              }
            }
            std::sort(expected.begin(), expected.end(),
                      [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
            CHECK(maximal_sequences(allocate(state, Interval{c, d})) == expected);
          }
      }
    }
  }
}

TEST_CASE("validate") {
  Instance good = small_reject_instance();
  CHECK(validate(good).empty());

  Instance instance = good;
  instance.horizon = 4;
  instance.requests.resize(4, good.requests[0]);
  instance.requests[3].p = 1.2;
  auto violations = validate(instance);
  REQUIRE(!violations.empty());
  CHECK(violations[0].find("requests[3].p") == 0);

  instance = good;
  instance.requests[1].interval = Interval{4, 2};
  violations = validate(instance);
  REQUIRE(!violations.empty());
  CHECK(violations[0].find("requests[1].interval") == 0);

  instance = good;
  instance.requests[0].p = std::numeric_limits<double>::quiet_NaN();
  CHECK(!validate(instance).empty());

  instance = good;
  instance.requests[0].rewards[1] = -1.0;
  CHECK(!validate(instance).empty());

  instance = good;
  instance.requests[0].attractions = {1.0, 1.0};  // attraction fields on a reject instance
  CHECK(!validate(instance).empty());
}

TEST_CASE("reduce_to_choice") {
  const Instance instance = small_reject_instance();
  const Instance reduced = reduce_to_choice(instance);
  CHECK(reduced.scenario == Scenario::choice_based);
  CHECK(reduced.resource_count == instance.resource_count);
  CHECK(reduced.slot_count == instance.slot_count);
  CHECK(reduced.horizon == instance.horizon);
  for (std::size_t t = 0; t < reduced.requests.size(); ++t) {
    CHECK(reduced.requests[t].p == instance.requests[t].p);
    CHECK(reduced.requests[t].interval == instance.requests[t].interval);
    CHECK(reduced.requests[t].rewards == instance.requests[t].rewards);
    CHECK(reduced.requests[t].attractions == std::vector<double>{1.0, 1.0});
    CHECK(reduced.requests[t].outside_attraction == 0.0);
  }
  CHECK(validate(reduced).empty());
  CHECK_THROWS_AS(reduce_to_choice(reduced), Error);

  Instance empty = instance;
  empty.horizon = 0;
  empty.requests.clear();
  CHECK(reduce_to_choice(empty).horizon == 0);

  Instance single = instance;
  single.resource_count = 1;
  for (auto& r : single.requests) r.rewards.resize(1);
  CHECK(reduce_to_choice(single).requests[0].attractions == std::vector<double>{1.0});
}

TEST_CASE("generate determinism and spec handling") {
  GenSpec spec;
  spec.scenario = Scenario::choice_based;
  spec.resource_range = {2, 4};
  spec.slot_range = {3, 6};
  spec.horizon_range = {2, 7};
  const Instance a = generate(7, spec);
  const Instance b = generate(7, spec);
  CHECK(to_json_string(a) == to_json_string(b));
  CHECK(a == b);
  CHECK(validate(a).empty());
  const Instance c = generate(8, spec);
  CHECK(to_json_string(a) != to_json_string(c));

  GenSpec zero_horizon = spec;
  zero_horizon.horizon_range = {0, 0};
  CHECK(generate(1, zero_horizon).requests.empty());

  GenSpec all_arrive = spec;
  all_arrive.p_range = {1.0, 1.0};
  for (const RequestType& r : generate(3, all_arrive).requests) CHECK(r.p == 1.0);

  GenSpec bad = spec;
  bad.slot_range = {4, 2};
  CHECK_THROWS_AS(generate(1, bad), Error);
}

TEST_CASE("slot state string round trip") {
  for (const char* bits : {"1", "0", "110110", "000000", "101011"}) {
    const SlotState state = SlotState::from_string(bits);
    CHECK(state.to_string() == bits);
    CHECK(SlotState::from_string(state.to_string()) == state);
  }
  CHECK_THROWS_AS(SlotState::from_string("10x"), Error);
}

TEST_CASE("instance JSON round trip and schema rejection") {
  GenSpec spec;
  spec.scenario = Scenario::choice_based;
  const Instance choice = generate(11, spec);
  CHECK(instance_from_json_string(to_json_string(choice)) == choice);

  const Instance reject = small_reject_instance();
  CHECK(instance_from_json_string(to_json_string(reject)) == reject);

  CHECK_THROWS_AS(instance_from_json_string(R"({"scenario":"reject","M":1,"N":1,"T":0,)"
                                            R"("requests":[],"extra":1})"),
                  Error);
  // Attraction fields are rejected on a reject-scenario instance.
  CHECK_THROWS_AS(instance_from_json_string(
                      R"({"scenario":"reject","M":1,"N":1,"T":1,)"
                      R"("requests":[{"p":1.0,"l":1,"r":1,"w":[1.0],"v":[1.0],"v0":0.0}]})"),
                  Error);
  CHECK_THROWS_AS(instance_from_json_string("not json"), Error);
}
