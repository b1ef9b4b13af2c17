#pragma once

// Test-only symbolic oracle: exact univariate polynomial / rational-function
// arithmetic over the prime field, with the evaluation point left as an
// indeterminate. Lets tests rebuild answers and updates from the definitions
// and check their pole/degree structure directly, instead of sampling at the
// finitely many server points.

#include <cstdint>
#include <utility>
#include <vector>

#include "acsarw/client.hpp"
#include "acsarw/codec.hpp"
#include "acsarw/field.hpp"

namespace symbolic {

using acsarw::Fe;
using acsarw::Field;

struct Poly {
    std::vector<Fe> c; // c[d] multiplies x^d; trailing zeros trimmed

    static Poly zero() { return {}; }
    static Poly constant(Fe v) {
        Poly p;
        if (!v.is_zero()) p.c = {v};
        return p;
    }
    // x - a
    static Poly linear_minus(const Field& f, Fe a) {
        Poly p;
        p.c = {-a, f.one()};
        return p;
    }

    bool is_zero() const { return c.empty(); }
    int degree() const { return static_cast<int>(c.size()) - 1; } // -1 for zero
    void trim() {
        while (!c.empty() && c.back().is_zero()) c.pop_back();
    }
    Fe eval(Fe x) const {
        Fe acc{0, x.q};
        for (std::size_t d = c.size(); d-- > 0;) acc = acc * x + c[d];
        return acc;
    }

    friend Poly operator+(const Poly& a, const Poly& b) {
        Poly r = a.c.size() >= b.c.size() ? a : b;
        const Poly& s = a.c.size() >= b.c.size() ? b : a;
        for (std::size_t d = 0; d < s.c.size(); ++d) r.c[d] += s.c[d];
        r.trim();
        return r;
    }
    friend Poly operator-(const Poly& a, const Poly& b) {
        Poly nb = b;
        for (Fe& e : nb.c) e = -e;
        return a + nb;
    }
    friend Poly operator*(const Poly& a, const Poly& b) {
        if (a.is_zero() || b.is_zero()) return {};
        Poly r;
        r.c.assign(a.c.size() + b.c.size() - 1, Fe{0, a.c[0].q});
        for (std::size_t i = 0; i < a.c.size(); ++i)
            for (std::size_t j = 0; j < b.c.size(); ++j) r.c[i + j] += a.c[i] * b.c[j];
        r.trim();
        return r;
    }
    friend Poly operator*(Fe s, const Poly& a) { return Poly::constant(s) * a; }
};

// Long division: num = q * den + r with deg r < deg den.
inline std::pair<Poly, Poly> divmod(Poly num, const Poly& den) {
    if (den.is_zero()) throw acsarw::UsageError("polynomial division by zero");
    Poly q;
    if (num.degree() >= den.degree())
        q.c.assign(num.degree() - den.degree() + 1, Fe{0, den.c.back().q});
    const Fe lead_inv = inv(den.c.back());
    while (!num.is_zero() && num.degree() >= den.degree()) {
        const int shift = num.degree() - den.degree();
        const Fe coef = num.c.back() * lead_inv;
        q.c[shift] = coef;
        for (std::size_t d = 0; d < den.c.size(); ++d) num.c[d + shift] -= coef * den.c[d];
        num.trim();
    }
    q.trim();
    return {q, num};
}

// Unreduced fraction num/den; arithmetic never cancels common factors, which
// is fine at the sizes tests use.
struct RF {
    Poly num, den;

    static RF from(Poly p, const Field& f) { return {std::move(p), Poly::constant(f.one())}; }
    static RF constant(Fe v, const Field& f) { return from(Poly::constant(v), f); }
    // 1 / (x - a)
    static RF pole(const Field& f, Fe a) {
        return {Poly::constant(f.one()), Poly::linear_minus(f, a)};
    }

    friend RF operator+(const RF& a, const RF& b) {
        return {a.num * b.den + b.num * a.den, a.den * b.den};
    }
    friend RF operator-(const RF& a, const RF& b) {
        return {a.num * b.den - b.num * a.den, a.den * b.den};
    }
    friend RF operator*(const RF& a, const RF& b) { return {a.num * b.num, a.den * b.den}; }
};

// If r is actually a polynomial (denominator divides numerator exactly),
// return it; otherwise report failure.
inline bool as_polynomial(const RF& r, Poly& out) {
    auto [q, rem] = divmod(r.num, r.den);
    if (!rem.is_zero()) return false;
    out = std::move(q);
    return true;
}

// One round's worth of randomly drawn protocol state, with every codeword the
// scheme produces rebuilt from its definition as a rational function of the
// evaluation point. Evaluating these at a server's point must reproduce what
// the implementation sends; inspecting their pole/degree structure checks the
// alignment claims themselves.
struct SymbolicRound {
    acsarw::SystemParams p;
    acsarw::RoundParams round;
    std::uint32_t theta;
    acsarw::Database db;
    acsarw::StorageNoise snoise;
    acsarw::QueryNoise qnoise;
    acsarw::IncrementNoise inoise;
    std::vector<Fe> delta;

    SymbolicRound(const acsarw::RawConfig& cfg, const std::vector<std::uint32_t>& sr,
                  const std::vector<std::uint32_t>& sw, std::uint32_t theta_, acsarw::Rng& rng)
        : p(acsarw::derive(cfg)), round(acsarw::round_params(p, 1, sr, sw)), theta(theta_),
          db(acsarw::Database::random(p, rng)), snoise(acsarw::StorageNoise::random(p, rng)),
          qnoise(acsarw::QueryNoise::random(p, rng)),
          inoise(acsarw::IncrementNoise::random(round, p, rng)) {
        delta.resize(p.length);
        for (Fe& e : delta) e = rng.uniform(p.field);
    }

    RF x_power(std::uint32_t e) const {
        Poly q;
        q.c.assign(e + 1, p.field.zero());
        q.c[e] = p.field.one();
        return RF::from(q, p.field);
    }
    // storage of block j, coordinate k, as a function of the evaluation point
    RF storage_rf(std::uint32_t j, std::uint32_t k) const {
        RF acc = RF::constant(p.field.zero(), p.field);
        for (std::uint32_t i = 1; i <= p.cfg.partitions; ++i)
            acc = acc + RF::constant(db.w(k, j, i), p.field) * RF::pole(p.field, p.pole(j, i));
        for (std::uint32_t x = 1; x <= p.cfg.storage_security; ++x)
            acc = acc + RF::constant(snoise.at(j, x, k), p.field) * x_power(x - 1);
        return acc;
    }
    // query row entry for (block j, component i, coordinate k)
    RF query_rf(std::uint32_t j, std::uint32_t i, std::uint32_t k) const {
        const std::uint32_t u = (j - 1) % p.cycle + 1;
        RF acc = RF::constant(k == theta ? p.field.one() : p.field.zero(), p.field);
        RF scale = RF::from(Poly::linear_minus(p.field, p.pole(j, i)), p.field);
        for (std::uint32_t s = 1; s <= p.cfg.privacy; ++s)
            acc = acc + RF::constant(qnoise.at(u, i, s, k), p.field) * scale * x_power(s - 1);
        return acc;
    }
    RF packer_rf(std::uint32_t j, std::uint32_t i) const {
        RF acc = RF::constant(p.field.one(), p.field);
        Fe denom = p.field.one();
        for (std::uint32_t ii = 1; ii <= p.cfg.partitions; ++ii)
            if (ii != i) {
                acc = acc * RF::from(Poly::linear_minus(p.field, p.pole(j, ii)), p.field);
                denom *= p.pole(j, i) - p.pole(j, ii);
            }
        return acc * RF::constant(inv(denom), p.field);
    }
    RF unpacker_rf(std::uint32_t j, std::uint32_t i) const {
        const std::uint32_t first = (j - 1) / round.write_batch * round.write_batch + 1;
        RF acc = RF::constant(p.field.one(), p.field);
        Fe denom = p.field.one();
        for (std::uint32_t jj = first; jj < first + round.write_batch; ++jj)
            if (jj != j) {
                acc = acc * RF::from(Poly::linear_minus(p.field, p.pole(jj, i)), p.field);
                denom *= p.pole(j, i) - p.pole(jj, i);
            }
        return acc * RF::constant(inv(denom), p.field);
    }
    RF shaper_rf(std::uint32_t j, std::uint32_t i) const {
        RF acc = RF::constant(p.field.one(), p.field);
        Fe denom = p.field.one();
        for (std::uint32_t m : round.write_dropouts) {
            acc = acc * RF::from(Poly::linear_minus(p.field, p.alpha(m)), p.field);
            denom *= p.pole(j, i) - p.alpha(m);
        }
        return acc * RF::constant(inv(denom), p.field);
    }
    RF increment_rf(std::uint32_t ell, std::uint32_t i) const {
        RF acc = RF::constant(p.field.zero(), p.field);
        for (std::uint32_t d = 0; d < round.write_batch; ++d) {
            const std::uint32_t j = (ell - 1) * round.write_batch + 1 + d;
            const Fe dji = delta[std::size_t(i - 1) + p.cfg.partitions * (j - 1)];
            acc = acc + RF::constant(dji, p.field) * RF::pole(p.field, p.pole(j, i));
        }
        for (std::uint32_t x = 1; x <= p.cfg.increment_security; ++x)
            acc = acc + RF::constant(inoise.at(ell, i, x), p.field) * x_power(x - 1);
        return acc;
    }
    RF answer_rf(std::uint32_t ell, std::uint32_t i) const {
        RF acc = RF::constant(p.field.zero(), p.field);
        for (std::uint32_t d = 0; d < round.read_batch; ++d) {
            const std::uint32_t j = (ell - 1) * round.read_batch + 1 + d;
            RF dot = RF::constant(p.field.zero(), p.field);
            for (std::uint32_t k = 1; k <= p.cfg.submodels; ++k)
                dot = dot + storage_rf(j, k) * query_rf(j, i, k);
            acc = acc + packer_rf(j, i) * dot;
        }
        return acc;
    }
    RF update_rf(std::uint32_t j, std::uint32_t k) const {
        const std::uint32_t ell = (j - 1) / round.write_batch + 1;
        RF acc = RF::constant(p.field.zero(), p.field);
        for (std::uint32_t i = 1; i <= p.cfg.partitions; ++i)
            acc = acc +
                  shaper_rf(j, i) * unpacker_rf(j, i) * increment_rf(ell, i) * query_rf(j, i, k);
        return acc;
    }
};

} // namespace symbolic
