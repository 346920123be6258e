#pragma once

#include <cmath>
#include <complex>
#include <vector>

namespace ionchain::msgate::detail {

// Sum of terms c * t^p * exp(i w t).  Closed under sums, products, conjugation
// and antiderivatives, which is all the piecewise pulse-envelope integrals
// need.  Terms whose frequency nearly cancels are integrated by power series
// instead of the closed form to avoid catastrophic cancellation in the
// exp(iwt)/(iw)^k stack.
class ExpPoly {
 public:
  struct Term {
    std::complex<double> c;
    int p = 0;
    double w = 0;
  };

  ExpPoly() = default;

  static ExpPoly constant(std::complex<double> c) { return term(c, 0, 0.0); }

  static ExpPoly term(std::complex<double> c, int p, double w) {
    ExpPoly e;
    e.add({c, p, w});
    return e;
  }

  const std::vector<Term>& terms() const { return terms_; }

  ExpPoly& operator+=(const ExpPoly& o) {
    for (const auto& t : o.terms_) add(t);
    return *this;
  }

  friend ExpPoly operator+(ExpPoly a, const ExpPoly& b) { return a += b; }

  friend ExpPoly operator*(const ExpPoly& a, const ExpPoly& b) {
    ExpPoly out;
    for (const auto& ta : a.terms_)
      for (const auto& tb : b.terms_) out.add({ta.c * tb.c, ta.p + tb.p, ta.w + tb.w});
    return out;
  }

  ExpPoly conj() const {
    ExpPoly out;
    for (const auto& t : terms_) out.add({std::conj(t.c), t.p, -t.w});
    return out;
  }

  std::complex<double> eval(double t) const {
    std::complex<double> v = 0;
    for (const auto& term : terms_)
      v += term.c * std::pow(t, term.p) * std::exp(std::complex<double>(0.0, term.w * t));
    return v;
  }

  // Antiderivative vanishing at t = 0; t_scale sets the series/closed switch.
  ExpPoly antiderivative(double t_scale) const {
    ExpPoly out;
    for (const auto& term : terms_) append_antiderivative(out, term, t_scale);
    out.add({-out.eval(0.0), 0, 0.0});
    return out;
  }

  std::complex<double> integrate(double a, double b, double t_scale) const {
    const ExpPoly f = antiderivative(t_scale);
    return f.eval(b) - f.eval(a);
  }

 private:
  void add(const Term& t) {
    if (t.c == std::complex<double>(0.0, 0.0)) return;
    for (auto& u : terms_) {
      if (u.p == t.p && u.w == t.w) {
        u.c += t.c;
        return;
      }
    }
    terms_.push_back(t);
  }

  static void append_antiderivative(ExpPoly& out, const Term& t, double t_scale) {
    if (std::abs(t.w) * t_scale < 1e-3) {
      // int t^p e^{iwt} dt = sum_m (iw)^m / m! * t^{p+m+1} / (p+m+1)
      const std::complex<double> iw(0.0, t.w);
      std::complex<double> fac = 1.0;
      for (int m = 0; m <= 32; ++m) {
        out.add({t.c * fac / double(t.p + m + 1), t.p + m + 1, 0.0});
        fac *= iw / double(m + 1);
        if (std::abs(fac) * std::pow(t_scale, m + 1) < 1e-30) break;
      }
      return;
    }
    // int t^p e^{iwt} dt = e^{iwt} sum_{k=0..p} (-1)^k p!/(p-k)! t^{p-k} / (iw)^{k+1}
    const std::complex<double> iw(0.0, t.w);
    std::complex<double> coef = t.c / iw;
    double falling = 1.0;
    for (int k = 0; k <= t.p; ++k) {
      out.add({coef * falling, t.p - k, t.w});
      falling *= double(t.p - k);
      coef /= -iw;
    }
  }

  std::vector<Term> terms_;
};

}  // namespace ionchain::msgate::detail
