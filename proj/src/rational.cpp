#include "flagcalc/rational.hpp"

#include <charconv>
#include <cmath>
#include <cstring>

namespace flagcalc {

Rational parse_rational(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("empty rational literal");
    if (s.find('.') != std::string::npos || s.find('e') != std::string::npos ||
        s.find('E') != std::string::npos)
        throw std::invalid_argument("rational literal must be p or p/q, got '" + s + "'");
    Rational r;
    if (r.set_str(s, 10) != 0)
        throw std::invalid_argument("bad rational literal '" + s + "'");
    if (r.get_den() == 0) throw std::invalid_argument("zero denominator in '" + s + "'");
    r.canonicalize();
    return r;
}

std::string rational_to_string(const Rational& r) {
    Rational c = r;
    c.canonicalize();
    if (c.get_den() == 1) return c.get_num().get_str();
    return c.get_num().get_str() + "/" + c.get_den().get_str();
}

double to_double(const Rational& r) { return r.get_d(); }

Rational rational_from_double(double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("non-finite double");
    Rational r;
    mpq_set_d(r.get_mpq_t(), x);
    return r;
}

Rational best_rational_approx(const Rational& x, const Integer& max_denom) {
    if (max_denom < 1) throw std::invalid_argument("max_denom must be >= 1");
    Integer p = x.get_num(), q = x.get_den();
    if (q <= max_denom) return x;

    // Convergents h/k of the continued fraction of x.
    Integer h0 = 1, k0 = 0;  // h_{-2}/k_{-2}
    Integer h1, k1;          // h_{-1}/k_{-1}
    Integer a, rem;
    mpz_fdiv_qr(a.get_mpz_t(), rem.get_mpz_t(), p.get_mpz_t(), q.get_mpz_t());
    h1 = a;
    k1 = 1;
    p = q;
    q = rem;
    while (q != 0) {
        mpz_fdiv_qr(a.get_mpz_t(), rem.get_mpz_t(), p.get_mpz_t(), q.get_mpz_t());
        Integer h2 = a * h1 + h0, k2 = a * k1 + k0;
        if (k2 > max_denom) {
            // Best semiconvergent between h0/k0 and h1/k1.
            Integer t = (max_denom - k0) / k1;
            Rational semi(h0 + t * h1, k0 + t * k1);
            semi.canonicalize();
            Rational conv(h1, k1);
            conv.canonicalize();
            Rational ds = abs(x - semi), dc = abs(x - conv);
            return ds < dc ? semi : conv;
        }
        h0 = h1;
        k0 = k1;
        h1 = h2;
        k1 = k2;
        p = q;
        q = rem;
    }
    Rational conv(h1, k1);
    conv.canonicalize();
    return conv;
}

Rational floor_to_denom(const Rational& x, const Integer& denom) {
    if (denom < 1) throw std::invalid_argument("denom must be >= 1");
    Integer num = x.get_num() * denom;
    Integer fl;
    mpz_fdiv_q(fl.get_mpz_t(), num.get_mpz_t(), x.get_den().get_mpz_t());
    Rational r(fl, denom);
    r.canonicalize();
    return r;
}

Integer binomial(unsigned n, unsigned k) {
    Integer r;
    if (k > n) return 0;
    mpz_bin_uiui(r.get_mpz_t(), n, k);
    return r;
}

Integer falling_factorial(unsigned n, unsigned k) {
    if (k > n) return 0;
    Integer r = 1;
    for (unsigned i = 0; i < k; ++i) r *= (n - i);
    return r;
}

std::string shortest_double_string(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

}  // namespace flagcalc
