#include "flagcalc/theory.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cctype>
#include <sstream>

#include "flagcalc/flag.hpp"

namespace flagcalc {

namespace {

std::string sha256_hex(const std::string& s) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(s.data(), s.size(), md, &len, EVP_sha256(), nullptr);
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned i = 0; i < len; ++i) {
        out.push_back(hex[md[i] >> 4]);
        out.push_back(hex[md[i] & 0xf]);
    }
    return out;
}

void validate_relations(const std::vector<RelationSpec>& rels, Symmetry sym) {
    if (rels.empty()) throw std::invalid_argument("theory needs at least one relation");
    for (const RelationSpec& r : rels) {
        if (r.name.empty() || (!std::isalpha(static_cast<unsigned char>(r.name[0])) && r.name[0] != '_'))
            throw std::invalid_argument("bad relation name '" + r.name + "'");
        for (char c : r.name)
            if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_')
                throw std::invalid_argument("bad relation name '" + r.name + "'");
        if (r.arity < 1 || r.arity > kMaxArity)
            throw std::invalid_argument("relation arity out of range");
    }
    for (size_t i = 0; i < rels.size(); ++i)
        for (size_t j = i + 1; j < rels.size(); ++j)
            if (rels[i].name == rels[j].name)
                throw std::invalid_argument("duplicate relation name '" + rels[i].name + "'");
    if (sym == Symmetry::Full) {
        if (rels.size() < 2)
            throw std::invalid_argument("FullSymmetry needs at least two relations");
        for (const RelationSpec& r : rels)
            if (r.arity != rels[0].arity || r.ordered != rels[0].ordered)
                throw std::invalid_argument(
                    "FullSymmetry requires all relations to share arity and orderedness");
    }
}

bool core_contains_core(const TheoryData& th, const FlagCore& big, unsigned small_n,
                        const std::string& small_key) {
    if (small_n > big.n) return false;
    std::vector<uint8_t> c(small_n);
    for (unsigned i = 0; i < small_n; ++i) c[i] = static_cast<uint8_t>(i);
    while (true) {
        FlagCore ind = induce_core(big, c);
        if (canonicalize_core(th, ind, 0).key == small_key) return true;
        int i = static_cast<int>(small_n) - 1;
        while (i >= 0 && c[i] == big.n - small_n + i) --i;
        if (i < 0) return false;
        ++c[i];
        for (unsigned j = i + 1; j < small_n; ++j) c[j] = c[j - 1] + 1;
    }
}

// Drop candidates that already contain a smaller (or equal) excluded core;
// result sorted by (size, key). Keeps the excluded set order-independent.
void reduce_excluded(TheoryData& data, std::vector<FlagCore> candidates) {
    std::vector<std::pair<std::string, FlagCore>> keyed;
    keyed.reserve(candidates.size());
    for (FlagCore& c : candidates) {
        std::string key = canonicalize_core(data, c, 0).key;
        keyed.emplace_back(std::move(key), std::move(c));
    }
    std::sort(keyed.begin(), keyed.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    data.excluded.clear();
    data.excluded_keys.clear();
    data.max_excluded_size = 0;
    for (auto& [key, core] : keyed) {
        bool redundant = false;
        for (size_t i = 0; i < data.excluded.size() && !redundant; ++i)
            if (core_contains_core(data, core, data.excluded[i].n, data.excluded_keys[i]))
                redundant = true;
        if (redundant) continue;
        CanonResult cr = canonicalize_core(data, core, 0);
        data.max_excluded_size = std::max<unsigned>(data.max_excluded_size, cr.core.n);
        data.excluded.push_back(std::move(cr.core));
        data.excluded_keys.push_back(key);
    }
}

}  // namespace

int TheoryData::rel_index(const std::string& nm) const {
    for (size_t i = 0; i < relations.size(); ++i)
        if (relations[i].name == nm) return static_cast<int>(i);
    return -1;
}

Theory Theory::make(const std::string& name, std::vector<RelationSpec> relations,
                    Symmetry symmetry) {
    validate_relations(relations, symmetry);
    auto data = std::make_shared<TheoryData>();
    data->name = name;
    data->relations = std::move(relations);
    data->symmetry = symmetry;
    return Theory(std::move(data));
}

Theory Theory::combine(const std::string& name, const std::vector<Theory>& parts,
                       Symmetry symmetry) {
    if (parts.empty()) throw std::invalid_argument("combine needs at least one theory");
    std::vector<RelationSpec> rels;
    std::vector<size_t> offsets;
    for (const Theory& p : parts) {
        offsets.push_back(rels.size());
        for (const RelationSpec& r : p.relations()) rels.push_back(r);
    }
    validate_relations(rels, symmetry);
    Theory base = make(name, rels, symmetry);

    // Inherited exclusions constrain only their own relations; the relations
    // of the other parts stay free, which is exactly a pattern expansion.
    std::vector<FlagCore> candidates;
    for (size_t pi = 0; pi < parts.size(); ++pi) {
        const TheoryData& pd = *parts[pi].data();
        for (const FlagCore& e : pd.excluded) {
            Pattern pat(base, e.n, {}, {});
            for (size_t r = 0; r < pd.relations.size(); ++r) {
                size_t slot = offsets[pi] + r;
                pat.required_[slot] = e.rels[r];
                TupleList forb;
                for (const Tuple& t :
                     all_tuples(e.n, pd.relations[r].arity, pd.relations[r].ordered))
                    if (!std::binary_search(e.rels[r].begin(), e.rels[r].end(), t))
                        forb.push_back(t);
                pat.forbidden_[slot] = std::move(forb);
            }
            for (const Flag& f : pat.compatible_flags()) candidates.push_back(f.core());
        }
    }
    auto data = std::make_shared<TheoryData>(*base.data());
    reduce_excluded(*data, std::move(candidates));
    return Theory(std::move(data));
}

Theory Theory::exclude(const std::vector<Flag>& flags, const std::vector<Pattern>& patterns) const {
    std::vector<FlagCore> candidates = d_->excluded;
    auto compatible = [&](const Theory& other) {
        if (other.symmetry() != symmetry() || other.relations().size() != relations().size())
            return false;
        for (size_t i = 0; i < relations().size(); ++i) {
            const RelationSpec &a = relations()[i], &b = other.relations()[i];
            if (a.name != b.name || a.arity != b.arity || a.ordered != b.ordered) return false;
        }
        return true;
    };
    for (const Flag& f : flags) {
        if (!compatible(f.theory()))
            throw std::invalid_argument("excluded flag comes from an incompatible theory");
        if (f.type_size() != 0)
            throw std::invalid_argument("excluded structures must be unlabeled");
        candidates.push_back(f.core());
    }
    for (const Pattern& p : patterns) {
        if (!compatible(p.theory()))
            throw std::invalid_argument("excluded pattern comes from an incompatible theory");
        if (p.type_size() != 0)
            throw std::invalid_argument("excluded structures must be unlabeled");
        for (const Flag& f : p.compatible_flags()) candidates.push_back(f.core());
    }
    auto data = std::make_shared<TheoryData>(*d_);
    reduce_excluded(*data, std::move(candidates));
    return Theory(std::move(data));
}

std::vector<Flag> Theory::excluded() const {
    std::vector<Flag> out;
    for (const FlagCore& e : d_->excluded) out.push_back(Flag::from_core(*this, e, {}, false));
    return out;
}

std::string Theory::serialize() const {
    std::ostringstream os;
    os << "relations=[";
    for (size_t i = 0; i < d_->relations.size(); ++i) {
        const RelationSpec& r = d_->relations[i];
        if (i) os << ',';
        os << r.name << '/' << r.arity << '/' << (r.ordered ? 'o' : 'u');
    }
    os << "];symmetry=" << (d_->symmetry == Symmetry::Full ? "full" : "none") << ";excluded=[";
    for (size_t i = 0; i < d_->excluded.size(); ++i) {
        if (i) os << ',';
        os << core_literal(*d_, d_->excluded[i], 0);
    }
    os << "]";
    return os.str();
}

std::string Theory::state_hash() const { return sha256_hex(serialize()); }

bool Theory::operator==(const Theory& o) const {
    if (!d_ || !o.d_) return d_ == o.d_;
    return d_ == o.d_ || serialize() == o.serialize();
}

}  // namespace flagcalc
