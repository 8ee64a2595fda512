#pragma once

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

namespace eael {

/// Binomial coefficient C(t, d) as a double; zero when t < d.
inline double binom_coeff(long long t, int d) {
    if (d < 0 || t < d) return 0.0;
    double v = 1.0;
    for (int q = 1; q <= d; ++q) v = v * static_cast<double>(t - d + q) / q;
    return v;
}

/// One term c * C(t, binom_degree) * lambda^(t - shift) of an expected-error
/// expression. A zero rate contributes only at t == shift (0^0 == 1 here);
/// for t != shift its power is taken as 0.
struct ClosedFormTerm {
    double c = 0.0;
    double lambda = 0.0;
    int binom_degree = 0;
    int shift = 0;
};

/// Expected error as an explicit function of the generation count.
struct ClosedFormError {
    std::vector<ClosedFormTerm> terms;
};

inline double evaluate_term(const ClosedFormTerm& term, int t) {
    const double comb = binom_coeff(t, term.binom_degree);
    if (comb == 0.0) return 0.0;
    double pw;
    if (term.lambda == 0.0) pw = (t == term.shift) ? 1.0 : 0.0;
    else pw = std::pow(term.lambda, t - term.shift);
    return term.c * comb * pw;
}

inline double evaluate_closed_form(const ClosedFormError& cf, int t) {
    double s = 0.0;
    for (const auto& term : cf.terms) s += evaluate_term(term, t);
    return s;
}

/// Human-readable rendering, e.g. "3*0.75^(t-1) + 2*C(t,1)*0.5^(t-1)".
inline std::string render_formula(const ClosedFormError& cf) {
    std::ostringstream os;
    os.precision(12);
    bool first = true;
    for (const auto& term : cf.terms) {
        if (term.c == 0.0 && cf.terms.size() > 1) continue;
        const double mag = std::abs(term.c);
        if (first) {
            if (term.c < 0) os << "-";
            first = false;
        } else {
            os << (term.c < 0 ? " - " : " + ");
        }
        os << mag;
        if (term.binom_degree > 0) os << "*C(t," << term.binom_degree << ")";
        os << "*" << term.lambda;
        if (term.shift == 0) {
            os << "^t";
        } else {
            os << "^(t" << (term.shift > 0 ? "-" : "+") << std::abs(term.shift) << ")";
        }
    }
    if (first) os << "0";
    return os.str();
}

} // namespace eael
