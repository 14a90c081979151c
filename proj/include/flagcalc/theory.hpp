#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "flagcalc/core.hpp"

namespace flagcalc {

class Flag;
class Pattern;

enum class Symmetry { None, Full };

struct RelationSpec {
    std::string name;
    unsigned arity = 2;
    bool ordered = false;
};

struct TheoryData {
    std::string name;
    std::vector<RelationSpec> relations;
    Symmetry symmetry = Symmetry::None;
    // Canonical untyped cores, reduced (no member contains another induced),
    // sorted by (size, canonical key). Keys aligned with cores.
    std::vector<FlagCore> excluded;
    std::vector<std::string> excluded_keys;
    unsigned max_excluded_size = 0;

    int rel_index(const std::string& name) const;
};

using TheoryPtr = std::shared_ptr<const TheoryData>;

// Immutable value handle; exclude() returns a new theory.
class Theory {
  public:
    Theory() = default;
    explicit Theory(TheoryPtr d) : d_(std::move(d)) {}

    static Theory make(const std::string& name, std::vector<RelationSpec> relations,
                       Symmetry symmetry = Symmetry::None);
    static Theory combine(const std::string& name, const std::vector<Theory>& parts,
                          Symmetry symmetry = Symmetry::None);

    Theory exclude(const std::vector<Flag>& flags, const std::vector<Pattern>& patterns = {}) const;

    const std::string& name() const { return d_->name; }
    const std::vector<RelationSpec>& relations() const { return d_->relations; }
    Symmetry symmetry() const { return d_->symmetry; }
    const TheoryPtr& data() const { return d_; }
    std::vector<Flag> excluded() const;

    // Canonical serialization of (relations, symmetry, excluded); the display
    // name stays out so renaming does not change identity.
    std::string serialize() const;
    std::string state_hash() const;  // SHA-256 hex of serialize()

    bool valid() const { return d_ != nullptr; }
    bool operator==(const Theory& o) const;

  private:
    TheoryPtr d_;
};

}  // namespace flagcalc
