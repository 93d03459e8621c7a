#include "subcurv/families.hpp"

namespace subcurv {

namespace {
std::string num(double v) { return format_number(v); }
}  // namespace

KFamily k_family_13(double rho1, double rho2, double kappa) {
  KFamily k;
  k.ell = 1;
  k.K = {RExpression::parse(num(rho1) + " - " + num(kappa) + "/r1", 1), RExpression(rho2)};
  return k;
}

KFamily k_family_example_a(double K, double m, double r0) {
  KFamily k;
  k.ell = 1;
  k.K = {RExpression::parse("min(" + num(r0) + " - " + num(m) + "/r1, " + num(K) + "*r1 - " +
                                num(r0) + " - 4/r1)",
                            1),
         RExpression(1.0)};
  return k;
}

KFamily k_family_grushin(int l, double alpha, double beta, bool stated) {
  KFamily k;
  k.ell = static_cast<std::size_t>(l);
  std::string sum;
  for (int i = 1; i <= l; ++i) {
    const int e = stated ? i - 1 : i + 1;
    std::string numer = i == 1 ? "1" : "r" + std::to_string(i - 1) + "^" + std::to_string(e);
    sum += (i > 1 ? " + " : "") + numer + "/r" + std::to_string(i) + "^" + std::to_string(i);
  }
  k.K.push_back(RExpression::parse("-" + num(alpha) + "*(" + sum + ")", k.ell));
  for (int i = 1; i <= l; ++i)
    k.K.push_back(RExpression::parse(num(beta) + (i == 1 ? "" : "*r" + std::to_string(i - 1)), k.ell));
  return k;
}

KFamily k_family_example_c() {
  KFamily k;
  k.ell = 2;
  k.K = {RExpression::parse("-(5/r1 + 2*r1/r2)", 2), RExpression::parse("1 - 4*r1^2/r2", 2),
         RExpression::parse("r1", 2)};
  return k;
}

KFamily k_family_kolmogorov(bool stated) {
  KFamily k;
  k.ell = 2;
  k.K = {RExpression(0.0), RExpression::parse(stated ? "1 + r2" : "1", 2),
         RExpression::parse("r1/2", 2)};
  k.omega = {{RExpression::parse("r1^2", 2), RExpression::parse("4*r2", 2)}};
  return k;
}

KFamily k_family_ou(double rho1) {
  KFamily k;
  k.ell = 0;
  k.K = {RExpression(rho1)};
  return k;
}

}  // namespace subcurv
