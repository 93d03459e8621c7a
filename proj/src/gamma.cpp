#include "subcurv/gamma.hpp"

namespace subcurv {

void OperatorSpec::validate() const {
  const std::size_t d = dimension();
  if (d == 0) throw GammaError("operator has no coordinates");
  for (std::size_t i = 0; i < fields.size(); ++i)
    if (fields[i].size() != d)
      throw GammaError("field X_" + std::to_string(i + 1) + " has " +
                       std::to_string(fields[i].size()) + " components, expected " +
                       std::to_string(d));
  if (drift.size() != d) throw GammaError("drift has the wrong number of components");
  auto check_arity = [d](const FieldVector& v) {
    for (const auto& e : v)
      if (e.arity() > d) throw GammaError("field coefficient references an unknown coordinate");
  };
  for (const auto& f : fields) check_arity(f);
  check_arity(drift);
}

JetForm OperatorSpec::apply(const JetForm& target) const {
  JetForm out;
  for (const auto& x : fields) out += apply_field(x, apply_field(x, target));
  out += apply_field(drift, target);
  return out;
}

Expression OperatorSpec::apply(const Expression& g) const {
  auto derive = [](const FieldVector& x, const Expression& h) {
    Expression r;
    for (std::size_t j = 0; j < x.size(); ++j)
      if (!x[j].is_zero()) r += x[j] * h.differentiate(j);
    return r;
  };
  Expression out;
  for (const auto& x : fields) out += derive(x, derive(x, g));
  out += derive(drift, g);
  return out;
}

SquareField::SquareField(std::string name, ExprMatrix matrix)
    : name_(std::move(name)), m_(std::move(matrix)) {
  const std::size_t d = m_.size();
  for (std::size_t a = 0; a < d; ++a) {
    if (m_[a].size() != d) throw GammaError("square field matrix must be square");
    for (std::size_t b = 0; b < a; ++b)
      if (!(m_[a][b] == m_[b][a]))
        throw GammaError("square field \"" + name_ + "\" is not symmetric");
  }
}

SquareField SquareField::zero(std::string name, std::size_t dim) {
  return SquareField(std::move(name), ExprMatrix(dim, std::vector<Expression>(dim)));
}

bool SquareField::is_zero() const {
  for (const auto& row : m_)
    for (const auto& e : row)
      if (!e.is_zero()) return false;
  return true;
}

JetForm SquareField::bilinear(const JetForm& f, const JetForm& g) const {
  const std::size_t d = m_.size();
  std::vector<JetForm> df(d), dg(d);
  for (std::size_t a = 0; a < d; ++a) {
    df[a] = f.total_derivative(a);
    dg[a] = &f == &g ? df[a] : g.total_derivative(a);
  }
  JetForm out;
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b)
      if (!m_[a][b].is_zero()) out += JetForm(m_[a][b]) * df[a] * dg[b];
  return out;
}

Expression SquareField::bilinear(const Expression& u, const Expression& w) const {
  const std::size_t d = m_.size();
  Expression out;
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b)
      if (!m_[a][b].is_zero()) out += m_[a][b] * u.differentiate(a) * w.differentiate(b);
  return out;
}

JetForm SquareField::diagonal() const {
  JetForm f = JetForm::symbol(JetSymbol{});
  return bilinear(f, f);
}

SquareField SquareField::permuted(const std::vector<std::size_t>& perm) const {
  const std::size_t d = m_.size();
  ExprMatrix m(d, std::vector<Expression>(d));
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b) m[a][b] = subcurv::permuted(m_[perm[a]][perm[b]], perm);
  return SquareField(name_, std::move(m));
}

SquareField carre_du_champ(const OperatorSpec& op) {
  op.validate();
  const std::size_t d = op.dimension();
  ExprMatrix m(d, std::vector<Expression>(d));
  for (const auto& x : op.fields)
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b) m[a][b] += x[a] * x[b];
  return SquareField("Gamma", std::move(m));
}

Gamma2Form gamma2(const SquareField& sf, const OperatorSpec& op) {
  op.validate();
  if (sf.dimension() != op.dimension())
    throw GammaError("square field and operator have different dimensions");
  const JetForm f = JetForm::symbol(JetSymbol{});
  const JetForm gf = sf.bilinear(f, f);
  const JetForm lf = op.apply(f);
  JetForm out = JetForm(Expression(Rational(1, 2))) * op.apply(gf) - sf.bilinear(f, lf);
  JetForm residual = out.terms_with_order(3);
  if (!residual.is_zero())
    throw GammaError("not a valid square-field/operator pair for \"" + sf.name() +
                     "\": third-order residual " + residual.to_string(op.coords));
  return Gamma2Form{sf, std::move(out)};
}

CommutationResult check_commutation(const SquareField& sf_i, const SquareField& sf0) {
  if (sf_i.dimension() != sf0.dimension())
    throw GammaError("square fields have different dimensions");
  const JetForm f = JetForm::symbol(JetSymbol{});
  JetForm lhs = sf_i.bilinear(sf0.diagonal(), f);
  JetForm rhs = sf0.bilinear(sf_i.diagonal(), f);
  CommutationResult r;
  r.residual = lhs - rhs;
  r.commutes = r.residual.is_zero();
  return r;
}

Expression permuted(const Expression& e, const std::vector<std::size_t>& perm) {
  // new coordinate k is old coordinate perm[k]; old index j maps to k with perm[k] == j
  std::vector<std::size_t> inv(perm.size());
  for (std::size_t k = 0; k < perm.size(); ++k) inv[perm[k]] = k;
  Expression out;
  for (const auto& [m, c] : e.terms()) {
    std::vector<int> exps(perm.size(), 0);
    const auto& old = m.exponents();
    for (std::size_t j = 0; j < old.size(); ++j) exps.at(inv.at(j)) = old[j];
    out += Expression::monomial(Monomial(std::move(exps)), c);
  }
  return out;
}

OperatorSpec permuted(const OperatorSpec& op, const std::vector<std::size_t>& perm) {
  std::vector<std::string> names(perm.size());
  for (std::size_t k = 0; k < perm.size(); ++k) names[k] = op.coords.name(perm[k]);
  auto map_vec = [&](const FieldVector& v) {
    FieldVector out(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) out[k] = permuted(v[perm[k]], perm);
    return out;
  };
  OperatorSpec out;
  out.coords = Coordinates(std::move(names));
  for (const auto& x : op.fields) out.fields.push_back(map_vec(x));
  out.drift = map_vec(op.drift);
  return out;
}

}  // namespace subcurv
