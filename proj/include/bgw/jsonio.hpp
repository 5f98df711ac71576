#pragma once

#include <string>

#include "bgw/family.hpp"
#include "bgw/pmf.hpp"

namespace bgw {

// JSON formats used by the command line and the test fixtures.
//
// Offspring law:
//   {"table": {"0": "1/4", "2": "1/4"},
//    "tails": [{"start": 3, "step": 2, "coeff": "6/5", "ratio": "1/2"}]}
// Values are rational strings ("1/4", "0.25") or JSON numbers; a single
// "tail" object is accepted in place of the "tails" array.
//
// Set family:
//   {"sets": [[0], [2, 3]],
//    "tails": [{"set": 2, "start": 3, "step": 2}]}
// "sets" lists the finite part of each class in order A_1..A_J; each "tails"
// entry unites the progression {start, start+step, ...} into the 1-based
// class "set".

PmfQ pmf_from_json(const std::string& text);
std::string pmf_to_json(const PmfQ& p);

SetFamily family_from_json(const std::string& text);
std::string family_to_json(const SetFamily& f);

// File variants; ConfigError on missing or malformed files.
PmfQ load_pmf(const std::string& path);
SetFamily load_family(const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace bgw
