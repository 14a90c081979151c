#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "flagcalc/blowup.hpp"
#include "flagcalc/rounding.hpp"

namespace flagcalc {

// Declarative problem file. Blocks "<section> { ... }" with the theory block
// first; inside a block every line is "<key> [=] <value...>". Unknown keys
// and sections are rejected, rational literals only.
struct Problem {
    Theory theory;
    AlgebraElement target;  // no basis when the file has no target block
    std::vector<AlgebraElement> positives;
    unsigned N = 0;
    bool maximize = true;
    bool exact = false;
    RoundingOptions rounding;
    std::optional<BlowupTemplate> construction;
    std::string certificate_path;  // empty: do not write
    std::string sdpa_path;
    int verbosity = 1;

    bool has_target() const { return static_cast<bool>(target.basis); }
};

// Rational-coefficient combination of flag literals, pattern literals
// (expanded over their compatible flags), filter(n; rel = count) sums over a
// generated basis, and rational constants. Terms of smaller size are lifted
// to the largest size present.
AlgebraElement parse_element(const Theory& th, const std::string& text);

Problem parse_problem(std::istream& is);  // errors carry line numbers
Problem load_problem(const std::string& path);

}  // namespace flagcalc
