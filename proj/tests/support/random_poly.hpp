#pragma once

#include <random>
#include <string>
#include <vector>

namespace approxlie::testing {

// Random polynomial text in the given variables with small integer
// coefficients and exponents up to maxExp.
inline std::string random_poly(std::mt19937_64& rng, const std::vector<std::string>& vars, int maxTerms = 4,
                               int maxExp = 2) {
  std::uniform_int_distribution<int> coef(-3, 3), expo(0, maxExp), count(1, maxTerms);
  std::string out = "0";
  for (int t = count(rng); t > 0; --t) {
    out += " + " + std::to_string(coef(rng));
    for (const auto& v : vars) out += "*" + v + "^" + std::to_string(expo(rng));
  }
  return out;
}

}  // namespace approxlie::testing
