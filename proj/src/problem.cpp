#include "flagcalc/problem.hpp"

#include <fstream>
#include <istream>
#include <sstream>

#include "flagcalc/generate.hpp"

namespace flagcalc {

namespace {

std::string trimmed(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

struct SignedTerm {
    int sign;
    std::string text;
};

// split on top level +/- only; parentheses and brackets shield their insides
std::vector<SignedTerm> split_terms(const std::string& text) {
    std::vector<SignedTerm> out;
    int depth = 0, sign = 1;
    std::string cur;
    for (char ch : text) {
        if (ch == '(' || ch == '[') ++depth;
        if (ch == ')' || ch == ']') --depth;
        if (depth == 0 && (ch == '+' || ch == '-')) {
            if (!trimmed(cur).empty()) {
                out.push_back({sign, trimmed(cur)});
                sign = 1;
            }
            if (ch == '-') sign = -sign;
            cur.clear();
        } else {
            cur += ch;
        }
    }
    if (!trimmed(cur).empty()) out.push_back({sign, trimmed(cur)});
    if (depth != 0) throw std::invalid_argument("unbalanced parentheses in element: " + text);
    return out;
}

// sum of all size-n flags with exactly the given tuple count in one relation
AlgebraElement expand_filter(const Theory& th, const std::string& text) {
    size_t open = text.find('('), close = text.rfind(')');
    std::string body = text.substr(open + 1, close - open - 1);
    size_t semi = body.find(';');
    if (semi == std::string::npos)
        throw std::invalid_argument("filter needs filter(n; relation = count): " + text);
    int n = -1;
    {
        std::istringstream hs(body.substr(0, semi));
        std::string extra;
        if (!(hs >> n) || n < 0 || (hs >> extra))
            throw std::invalid_argument("bad size in filter: " + text);
    }
    size_t eq = body.find('=', semi);
    if (eq == std::string::npos)
        throw std::invalid_argument("filter needs filter(n; relation = count): " + text);
    std::string rel = trimmed(body.substr(semi + 1, eq - semi - 1));
    int idx = th.data()->rel_index(rel);
    if (idx < 0) throw std::invalid_argument("unknown relation in filter: " + rel);
    int want = -1;
    {
        std::istringstream cs(body.substr(eq + 1));
        std::string extra;
        if (!(cs >> want) || want < 0 || (cs >> extra))
            throw std::invalid_argument("bad tuple count in filter: " + text);
    }
    BasisPtr basis = generate(th, static_cast<unsigned>(n));
    AlgebraElement e{basis, std::vector<Rational>(basis->size())};
    for (size_t i = 0; i < basis->size(); ++i)
        if (basis->flags[i].core().rels[idx].size() == static_cast<size_t>(want)) e.coeffs[i] = 1;
    return e;
}

AlgebraElement expand_pattern(const Theory& th, const std::string& text) {
    Pattern p = parse_pattern_literal(th, text);
    if (p.type_size() != 0)
        throw std::invalid_argument("element terms must be untyped: " + text);
    BasisPtr basis = generate(th, p.size());
    AlgebraElement e{basis, std::vector<Rational>(basis->size())};
    for (const Flag& f : p.compatible_flags()) {
        long idx = basis->index_of(f);
        if (idx < 0) throw std::logic_error("pattern completion missing from basis");
        e.coeffs[static_cast<size_t>(idx)] = 1;
    }
    return e;
}

}  // namespace

AlgebraElement parse_element(const Theory& th, const std::string& text) {
    std::vector<SignedTerm> terms = split_terms(text);
    if (terms.empty()) throw std::invalid_argument("empty element expression");
    Rational constant = 0;
    std::vector<std::pair<Rational, AlgebraElement>> parts;
    for (const auto& [sign, term] : terms) {
        Rational coeff = sign;
        std::string atom = term;
        size_t star = std::string::npos;
        int depth = 0;
        for (size_t i = 0; i < term.size(); ++i) {
            if (term[i] == '(' || term[i] == '[') ++depth;
            if (term[i] == ')' || term[i] == ']') --depth;
            if (depth == 0 && term[i] == '*') {
                star = i;
                break;
            }
        }
        if (star != std::string::npos) {
            coeff *= parse_rational(trimmed(term.substr(0, star)));
            atom = trimmed(term.substr(star + 1));
        }
        if (atom.find('(') == std::string::npos) {
            constant += coeff * parse_rational(atom);
            continue;
        }
        std::string head = trimmed(atom.substr(0, atom.find('(')));
        AlgebraElement e;
        if (head == "flag")
            e = element_of(parse_flag_literal(th, atom));
        else if (head == "pattern")
            e = expand_pattern(th, atom);
        else if (head == "filter")
            e = expand_filter(th, atom);
        else
            throw std::invalid_argument("unknown element term: " + atom);
        if (e.ftype().size() != 0)
            throw std::invalid_argument("element terms must be untyped: " + atom);
        parts.emplace_back(coeff, std::move(e));
    }
    unsigned n = 0;
    for (const auto& [coeff, e] : parts) n = std::max(n, e.size());
    Flag empty = make_flag(th, 0, {});
    AlgebraElement acc = constant_element(th, empty, n, constant);
    for (const auto& [coeff, e] : parts) acc = add(acc, scale(lift(e, n), coeff));
    return acc;
}

namespace {

struct Line {
    int no;
    std::string text;
};

std::vector<Line> read_lines(std::istream& is) {
    std::vector<Line> out;
    std::string raw;
    int no = 0;
    while (std::getline(is, raw)) {
        ++no;
        size_t hash = raw.find('#');
        if (hash != std::string::npos) raw.resize(hash);
        std::string t = trimmed(raw);
        if (!t.empty()) out.push_back({no, t});
    }
    return out;
}

[[noreturn]] void fail(const Line& ln, const std::string& msg) {
    throw std::runtime_error("problem file line " + std::to_string(ln.no) + ": " + msg);
}

// "key [=] value" with the key as the first word
std::pair<std::string, std::string> keyval(const Line& ln) {
    size_t sp = ln.text.find_first_of(" \t=");
    if (sp == std::string::npos) return {ln.text, ""};
    std::string key = ln.text.substr(0, sp);
    std::string rest = trimmed(ln.text.substr(sp));
    if (!rest.empty() && rest[0] == '=') rest = trimmed(rest.substr(1));
    return {key, rest};
}

long parse_count(const Line& ln, const std::string& what, const std::string& text) {
    try {
        size_t pos = 0;
        long v = std::stol(text, &pos);
        if (pos != text.size() || v <= 0) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        fail(ln, what + " needs a positive integer, got '" + text + "'");
    }
}

bool parse_bool(const Line& ln, const std::string& what, const std::string& text) {
    if (text == "true") return true;
    if (text == "false") return false;
    fail(ln, what + " must be true or false, got '" + text + "'");
}

}  // namespace

Problem parse_problem(std::istream& is) {
    std::vector<Line> lines = read_lines(is);
    Problem p;
    bool have_theory = false, have_settings = false, have_target = false;
    std::string name = "Theory";
    std::vector<RelationSpec> relations;
    Symmetry symmetry = Symmetry::None;
    std::vector<std::string> excludes;
    size_t i = 0;
    while (i < lines.size()) {
        const Line& open = lines[i];
        std::istringstream hs(open.text);
        std::string section, brace;
        if (!(hs >> section >> brace) || brace != "{" || (hs >> brace))
            fail(open, "expected '<section> {', got '" + open.text + "'");
        std::vector<Line> body;
        ++i;
        while (i < lines.size() && lines[i].text != "}") body.push_back(lines[i++]);
        if (i == lines.size()) fail(open, "unterminated '" + section + "' block");
        ++i;
        if (section == "theory") {
            if (have_theory) fail(open, "duplicate theory block");
            have_theory = true;
            for (const Line& ln : body) {
                auto [key, val] = keyval(ln);
                if (key == "name") {
                    if (val.empty()) fail(ln, "name needs a value");
                    name = val;
                } else if (key == "relation") {
                    std::istringstream rs(val);
                    RelationSpec spec;
                    std::string order, extra;
                    if (!(rs >> spec.name >> spec.arity >> order) || (rs >> extra) ||
                        (order != "ordered" && order != "unordered"))
                        fail(ln, "relation needs '<name> <arity> ordered|unordered'");
                    spec.ordered = order == "ordered";
                    relations.push_back(spec);
                } else if (key == "symmetry") {
                    if (val == "none")
                        symmetry = Symmetry::None;
                    else if (val == "full")
                        symmetry = Symmetry::Full;
                    else
                        fail(ln, "symmetry must be none or full");
                } else if (key == "exclude") {
                    excludes.push_back(val);
                } else {
                    fail(ln, "unknown theory key '" + key + "'");
                }
            }
            if (relations.empty()) fail(open, "theory block needs at least one relation");
            p.theory = Theory::make(name, relations, symmetry);
            for (const std::string& text : excludes) {
                try {
                    if (text.rfind("pattern", 0) == 0)
                        p.theory = p.theory.exclude({}, {parse_pattern_literal(p.theory, text)});
                    else
                        p.theory = p.theory.exclude({parse_flag_literal(p.theory, text)});
                } catch (const std::exception& ex) {
                    fail(open, std::string("bad exclusion: ") + ex.what());
                }
            }
            continue;
        }
        if (!have_theory) fail(open, "the theory block must come first");
        if (section == "target") {
            if (have_target) fail(open, "duplicate target block");
            have_target = true;
            for (const Line& ln : body) {
                auto [key, val] = keyval(ln);
                if (key != "element") fail(ln, "unknown target key '" + key + "'");
                if (p.has_target()) fail(ln, "target block takes a single element");
                try {
                    p.target = parse_element(p.theory, val);
                } catch (const std::exception& ex) {
                    fail(ln, ex.what());
                }
            }
            if (!p.has_target()) fail(open, "target block needs an element");
        } else if (section == "positive") {
            for (const Line& ln : body) {
                auto [key, val] = keyval(ln);
                if (key != "element") fail(ln, "unknown positive key '" + key + "'");
                try {
                    p.positives.push_back(parse_element(p.theory, val));
                } catch (const std::exception& ex) {
                    fail(ln, ex.what());
                }
            }
        } else if (section == "settings") {
            if (have_settings) fail(open, "duplicate settings block");
            have_settings = true;
            for (const Line& ln : body) {
                auto [key, val] = keyval(ln);
                if (key == "N")
                    p.N = static_cast<unsigned>(parse_count(ln, "N", val));
                else if (key == "sense") {
                    if (val == "maximize")
                        p.maximize = true;
                    else if (val == "minimize")
                        p.maximize = false;
                    else
                        fail(ln, "sense must be maximize or minimize");
                } else if (key == "exact")
                    p.exact = parse_bool(ln, "exact", val);
                else if (key == "denom")
                    p.rounding.denom = parse_count(ln, "denom", val);
                else if (key == "kernel_denom")
                    p.rounding.kernel_denom = parse_count(ln, "kernel_denom", val);
                else if (key == "slack_threshold") {
                    // rational literals only, like everything else in the file
                    Rational r;
                    try {
                        r = parse_rational(val);
                    } catch (const std::exception& ex) {
                        fail(ln, ex.what());
                    }
                    if (r <= 0) fail(ln, "slack_threshold must be positive");
                    p.rounding.slack_threshold = to_double(r);
                } else if (key == "construction") {
                    try {
                        p.construction = parse_blowup_literal(p.theory, val);
                    } catch (const std::exception& ex) {
                        fail(ln, ex.what());
                    }
                } else if (key == "certificate")
                    p.certificate_path = val;
                else if (key == "sdpa")
                    p.sdpa_path = val;
                else if (key == "verbosity") {
                    if (val != "0" && val != "1" && val != "2")
                        fail(ln, "verbosity must be 0, 1 or 2");
                    p.verbosity = val[0] - '0';
                } else
                    fail(ln, "unknown settings key '" + key + "'");
            }
        } else {
            fail(open, "unknown section '" + section + "'");
        }
    }
    if (!have_theory) throw std::runtime_error("problem file has no theory block");
    return p;
}

Problem load_problem(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open problem file " + path);
    try {
        return parse_problem(is);
    } catch (const std::exception& ex) {
        throw std::runtime_error(path + ": " + ex.what());
    }
}

}  // namespace flagcalc
