#include "mamix/element.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mamix {

namespace {

constexpr double kBaryTol = 1e-10;

struct BernsteinBasis {
  int degree;
  std::vector<std::array<int, 3>> powers;  // (i, j, m), i + j + m = degree
  std::vector<double> scale;               // multinomial coefficients

  explicit BernsteinBasis(int k) : degree(k) {
    auto binom = [](int n, int r) {
      double v = 1.0;
      for (int t = 0; t < r; ++t) v = v * (n - t) / (t + 1);
      return v;
    };
    for (int i = k; i >= 0; --i)
      for (int j = k - i; j >= 0; --j) {
        const int m = k - i - j;
        powers.push_back({i, j, m});
        scale.push_back(binom(k, i) * binom(k - i, j));
      }
  }

  int size() const { return static_cast<int>(powers.size()); }

  // Values and lambda-partials of all Bernstein polynomials at a barycentric point.
  void eval(const Bary& p, Eigen::VectorXd& vals, Eigen::VectorXd& d0, Eigen::VectorXd& d1,
            Eigen::VectorXd& d2) const {
    const int n = size();
    vals.resize(n);
    d0.resize(n);
    d1.resize(n);
    d2.resize(n);
    auto ipow = [](double x, int e) {
      double v = 1.0;
      for (int t = 0; t < e; ++t) v *= x;
      return v;
    };
    for (int q = 0; q < n; ++q) {
      const auto [i, j, m] = powers[q];
      const double c = scale[q];
      const double p0 = ipow(p.b0, i), p1 = ipow(p.b1, j), p2 = ipow(p.b2, m);
      vals[q] = c * p0 * p1 * p2;
      d0[q] = (i > 0) ? c * i * ipow(p.b0, i - 1) * p1 * p2 : 0.0;
      d1[q] = (j > 0) ? c * j * p0 * ipow(p.b1, j - 1) * p2 : 0.0;
      d2[q] = (m > 0) ? c * m * p0 * p1 * ipow(p.b2, m - 1) : 0.0;
    }
  }
};

}  // namespace

ReferenceElement ReferenceElement::create(int degree) {
  if (degree < 1) throw std::invalid_argument("ReferenceElement: degree must be >= 1");
  ReferenceElement elem;
  elem.degree_ = degree;
  const int k = degree;

  // Lattice nodes grouped vertex / edge / interior; edge nodes run from the
  // edge's first vertex toward its second.
  elem.nodes_.emplace_back(1, 0, 0);
  elem.nodes_.emplace_back(0, 1, 0);
  elem.nodes_.emplace_back(0, 0, 1);
  elem.roles_.push_back({NodeRole::vertex, 0, 0});
  elem.roles_.push_back({NodeRole::vertex, 1, 0});
  elem.roles_.push_back({NodeRole::vertex, 2, 0});
  for (int e = 0; e < 3; ++e) {
    for (int s = 1; s < k; ++s) {
      std::array<double, 3> b{0, 0, 0};
      b[e] = double(k - s) / k;
      b[(e + 1) % 3] = double(s) / k;
      elem.nodes_.emplace_back(b[0], b[1], b[2]);
      elem.roles_.push_back({NodeRole::edge, e, s});
    }
  }
  int interior_count = 0;
  for (int j = 1; j <= k - 2; ++j)
    for (int m = 1; m <= k - 1 - j; ++m) {
      const int i = k - j - m;
      elem.nodes_.emplace_back(double(i) / k, double(j) / k, double(m) / k);
      elem.roles_.push_back({NodeRole::interior, interior_count++, 0});
    }

  const int n = elem.num_nodes();
  if (n != (k + 1) * (k + 2) / 2) throw std::logic_error("ReferenceElement: node count mismatch");

  // Nodal basis in Bernstein coordinates: solve V C = I with V_lq = B_q(node_l).
  BernsteinBasis bern(k);
  Eigen::MatrixXd V(n, n);
  Eigen::VectorXd vals, d0, d1, d2;
  for (int l = 0; l < n; ++l) {
    bern.eval(elem.nodes_[l], vals, d0, d1, d2);
    V.row(l) = vals.transpose();
  }
  elem.coeffs_ = V.fullPivLu().solve(Eigen::MatrixXd::Identity(n, n));
  return elem;
}

BasisEval ReferenceElement::eval_basis(const Bary& point) const {
  const double sum = point.b0 + point.b1 + point.b2;
  if (std::abs(sum - 1.0) > kBaryTol || point.b0 < -kBaryTol || point.b1 < -kBaryTol ||
      point.b2 < -kBaryTol)
    throw std::invalid_argument("eval_basis: point is not a barycentric coordinate of the simplex");

  BernsteinBasis bern(degree_);
  Eigen::VectorXd vals, d0, d1, d2;
  bern.eval(point, vals, d0, d1, d2);
  // lambda = (1 - r - s, r, s)
  const Eigen::VectorXd dr = d1 - d0;
  const Eigen::VectorXd ds = d2 - d0;

  const int n = num_nodes();
  BasisEval out;
  out.values.resize(n);
  out.gradients.resize(n);
  const Eigen::VectorXd v = coeffs_.transpose() * vals;
  const Eigen::VectorXd gr = coeffs_.transpose() * dr;
  const Eigen::VectorXd gs = coeffs_.transpose() * ds;
  for (int i = 0; i < n; ++i) {
    out.values[i] = v[i];
    out.gradients[i] = Vec2(gr[i], gs[i]);
  }
  return out;
}

namespace {

struct Orbit {
  enum Kind { centroid, perm3, perm6 } kind;
  double a = 0, b = 0, c = 0;  // perm3: (a, b, b) with a + 2b = 1; perm6: (a, b, c)
  double weight = 0;           // per point, normalized so all weights sum to 1
};

struct RuleSpec {
  int exactness;
  std::vector<Orbit> orbits;
};

// Symmetric positive-weight rules with all points inside the triangle
// (Strang / Dunavant family), verified against a! b! / (a+b+2)!.
const std::vector<RuleSpec>& rule_table() {
  static const std::vector<RuleSpec> table = {
      {1, {{Orbit::centroid, 0, 0, 0, 1.0}}},
      {2, {{Orbit::perm3, 2.0 / 3.0, 1.0 / 6.0, 0, 1.0 / 3.0}}},
      {4,
       {{Orbit::perm3, 0.816847572980459, 0.091576213509771, 0, 0.109951743655322},
        {Orbit::perm3, 0.108103018168070, 0.445948490915965, 0, 0.223381589678011}}},
      {5,
       {{Orbit::centroid, 0, 0, 0, 0.225},
        {Orbit::perm3, 0.059715871789770, 0.470142064105115, 0, 0.132394152788506},
        {Orbit::perm3, 0.797426985353087, 0.101286507323456, 0, 0.125939180544827}}},
      {6,
       {{Orbit::perm3, 0.873821971016996, 0.063089014491502, 0, 0.050844906370207},
        {Orbit::perm3, 0.501426509658179, 0.249286745170910, 0, 0.116786275726379},
        {Orbit::perm6, 0.636502499121399, 0.310352451033785, 0.053145049844816,
         0.082851075618374}}},
      {8,
       {{Orbit::centroid, 0, 0, 0, 0.14431560767780161},
        {Orbit::perm3, 0.081414823414534015, 0.45929258829273299, 0, 0.095091634267274461},
        {Orbit::perm3, 0.65886138449646214, 0.17056930775176893, 0, 0.10321737053472635},
        {Orbit::perm3, 0.89890554336593675, 0.050547228317031625, 0, 0.0324584976231981},
        {Orbit::perm6, 0.0083947774099599557, 0.26311282963461813, 0.72849239295542191,
         0.027230314174433612}}},
      {10,
       {{Orbit::centroid, 0, 0, 0, 0.090817990382754},
        {Orbit::perm3, 0.028844733232685, 0.485577633383657, 0, 0.036725957756467},
        {Orbit::perm3, 0.781036849029926, 0.109481575485037, 0, 0.045321059435528},
        {Orbit::perm6, 0.141707219414880, 0.307939838764121, 0.550352941820999,
         0.072757916845420},
        {Orbit::perm6, 0.025003534762686, 0.246672560639903, 0.728323904597411,
         0.028327242531057},
        {Orbit::perm6, 0.009540815400299, 0.066803251012200, 0.923655933587500,
         0.009421666963733}}},
      {12,
       {{Orbit::perm3, 0.023565220452390, 0.488217389773805, 0, 0.025731066440455},
        {Orbit::perm3, 0.120551215411079, 0.439724392294460, 0, 0.043692544538038},
        {Orbit::perm3, 0.457579229975768, 0.271210385012116, 0, 0.062858224217885},
        {Orbit::perm3, 0.744847708916828, 0.127576145541586, 0, 0.034796112930709},
        {Orbit::perm3, 0.957365299093579, 0.021317350453210, 0, 0.006166261051559},
        {Orbit::perm6, 0.115343494534698, 0.275713269685514, 0.608943235779788,
         0.040371557766381},
        {Orbit::perm6, 0.022838332222257, 0.281325580989940, 0.695836086787803,
         0.022356773202303},
        {Orbit::perm6, 0.025734050548330, 0.116251915907597, 0.858014033544073,
         0.017316231108659}}},
  };
  return table;
}

}  // namespace

QuadratureRule make_quadrature(int min_exactness) {
  if (min_exactness < 1) throw std::invalid_argument("make_quadrature: exactness must be >= 1");
  const auto& table = rule_table();
  const auto it = std::find_if(table.begin(), table.end(),
                               [&](const RuleSpec& r) { return r.exactness >= min_exactness; });
  if (it == table.end())
    throw UnsupportedDegreeError("make_quadrature: exactness " + std::to_string(min_exactness) +
                                 " exceeds the tabulated cap of 12");

  QuadratureRule rule;
  rule.exactness_degree = it->exactness;
  for (const auto& orb : it->orbits) {
    const double w = 0.5 * orb.weight;  // reference triangle area
    switch (orb.kind) {
      case Orbit::centroid:
        rule.points.push_back({{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}, w});
        break;
      case Orbit::perm3: {
        const double a = orb.a, b = orb.b;
        rule.points.push_back({{a, b, b}, w});
        rule.points.push_back({{b, a, b}, w});
        rule.points.push_back({{b, b, a}, w});
        break;
      }
      case Orbit::perm6: {
        const double a = orb.a, b = orb.b, c = orb.c;
        rule.points.push_back({{a, b, c}, w});
        rule.points.push_back({{a, c, b}, w});
        rule.points.push_back({{b, a, c}, w});
        rule.points.push_back({{b, c, a}, w});
        rule.points.push_back({{c, a, b}, w});
        rule.points.push_back({{c, b, a}, w});
        break;
      }
    }
  }
  return rule;
}

LineQuadrature make_line_quadrature(int min_exactness) {
  if (min_exactness < 0) throw std::invalid_argument("make_line_quadrature: negative exactness");
  const int n = std::max(1, (min_exactness + 2) / 2);  // 2n - 1 >= min_exactness

  // Gauss-Legendre nodes on (-1,1) by Newton iteration on P_n.
  LineQuadrature rule;
  rule.exactness_degree = 2 * n - 1;
  for (int i = 0; i < n; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      if (n == 1) p1 = x;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      const double pn = (n == 1) ? x : p1;
      const double pnm1 = (n == 1) ? 1.0 : p0;
      pp = n * (x * pn - pnm1) / (x * x - 1.0);
      const double dx = pn / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.points.push_back(0.5 * (x + 1.0));
    rule.weights.push_back(1.0 / ((1.0 - x * x) * pp * pp));  // = (2 / ((1-x^2) P'^2)) / 2
  }
  // ascending point order for determinism
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(),
            [&](int a, int b) { return rule.points[a] < rule.points[b]; });
  LineQuadrature sorted;
  sorted.exactness_degree = rule.exactness_degree;
  for (int i : idx) {
    sorted.points.push_back(rule.points[i]);
    sorted.weights.push_back(rule.weights[i]);
  }
  return sorted;
}

std::vector<double> interpolation_error_probe(const ReferenceElement& elem,
                                              const std::function<double(Vec2)>& fn,
                                              const std::vector<Mesh>& meshes) {
  const QuadratureRule quad = make_quadrature(12);
  std::vector<BasisEval> basis_at_q;
  for (const auto& qp : quad.points) basis_at_q.push_back(elem.eval_basis(qp.point));

  std::vector<double> errors;
  for (const auto& mesh : meshes) {
    double sup = 0.0;
    std::vector<double> nodal(elem.num_nodes());
    for (int t = 0; t < mesh.num_triangles(); ++t) {
      const ElementMap map = mesh.element_map(t);
      for (int i = 0; i < elem.num_nodes(); ++i) {
        const Bary& node = elem.nodes()[i];
        nodal[i] = fn(map.to_physical(node.r(), node.s()));
      }
      for (size_t q = 0; q < quad.points.size(); ++q) {
        double interp = 0.0;
        for (int i = 0; i < elem.num_nodes(); ++i) interp += nodal[i] * basis_at_q[q].values[i];
        const Bary& p = quad.points[q].point;
        sup = std::max(sup, std::abs(interp - fn(map.to_physical(p.r(), p.s()))));
      }
    }
    errors.push_back(sup);
  }
  return errors;
}

}  // namespace mamix
