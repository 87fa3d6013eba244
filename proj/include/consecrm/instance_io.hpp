#pragma once

#include <string>

#include "consecrm/core.hpp"

namespace consecrm {

// Instance file format (UTF-8 JSON):
//   {"scenario": "reject"|"choice", "M": int, "N": int, "T": int,
//    "requests": [{"p": num, "l": int, "r": int, "w": [num x M],
//                  "v": [num x M] (choice only), "v0": num (choice only)}]}
// Field order is irrelevant; unknown fields are rejected.
std::string to_json_string(const Instance& instance, int indent = 2);
Instance instance_from_json_string(const std::string& text);

Instance load_instance(const std::string& path);
void save_instance(const Instance& instance, const std::string& path);

}  // namespace consecrm
