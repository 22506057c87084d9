#include "twv/wada_engine.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace twv {

template <class R>
LaurentMatrix<R> phi(const SymPowerRep<R>& rho, const AlphaMap& alpha, const GroupRingElement& e) {
  const auto n = static_cast<std::size_t>(rho.dim);
  std::map<int, CMatrix<R>> by_exponent;
  for (const auto& [word, coefficient] : e.terms()) {
    const int degree = alpha_degree(word, alpha);
    auto term = evaluate_word(rho, word) * Complex<R>(R(static_cast<double>(coefficient)));
    if (auto it = by_exponent.find(degree); it != by_exponent.end()) {
      it->second += term;
    } else {
      by_exponent.emplace(degree, std::move(term));
    }
  }
  std::vector<std::pair<int, CMatrix<R>>> terms(by_exponent.begin(), by_exponent.end());
  return LaurentMatrix<R>::from_terms(n, n, terms);
}

template <class R>
FoxMatrix<R>::FoxMatrix(int relators, int generators, int dim, std::vector<LaurentMatrix<R>> blocks)
    : relators_(relators), generators_(generators), dim_(dim), blocks_(std::move(blocks)) {
  if (static_cast<int>(blocks_.size()) != relators_ * generators_) {
    throw std::invalid_argument("FoxMatrix: wrong number of blocks");
  }
}

template <class R>
LaurentMatrix<R> FoxMatrix<R>::without_column(int deleted) const {
  const auto n = static_cast<std::size_t>(dim_);
  const auto rows = static_cast<std::size_t>(relators_) * n;
  const auto cols = static_cast<std::size_t>(generators_ - 1) * n;
  LaurentMatrix<R> out(rows, cols);
  for (int i = 0; i < relators_; ++i) {
    int out_block = 0;
    for (int j = 0; j < generators_; ++j) {
      if (j == deleted) continue;
      const auto& b = block(i, j);
      for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
          out(static_cast<std::size_t>(i) * n + r, static_cast<std::size_t>(out_block) * n + c) = b(r, c);
        }
      }
      ++out_block;
    }
  }
  return out;
}

template <class R>
FoxMatrix<R> build_fox_matrix(const Presentation& p, const SymPowerRep<R>& rho, const AlphaMap& alpha) {
  if (p.deficiency() != 1) {
    throw MathError("Fox matrix needs a deficiency-1 presentation, got deficiency " +
                    std::to_string(p.deficiency()));
  }
  const auto n = static_cast<std::size_t>(rho.dim);
  const auto gens = static_cast<std::size_t>(p.generator_count());
  std::vector<LaurentMatrix<R>> blocks;
  blocks.reserve(static_cast<std::size_t>(p.relator_count()) * gens);
  for (const auto& r : p.relators()) {
    // Same terms as phi(fox_derivative(r, j)), but the prefix images are
    // built incrementally: one matrix product per letter.
    std::vector<std::map<int, CMatrix<R>>> acc(gens);
    auto add = [&](std::size_t g, int degree, const CMatrix<R>& m, bool negate) {
      auto& slot = acc[g];
      auto it = slot.find(degree);
      if (it == slot.end()) {
        slot.emplace(degree, negate ? m * Complex<R>(R(-1)) : m);
      } else if (negate) {
        it->second -= m;
      } else {
        it->second += m;
      }
    };
    auto prefix = CMatrix<R>::identity(n);
    int degree = 0;
    for (const auto& l : r.letters()) {
      const auto g = static_cast<std::size_t>(l.generator);
      if (l.sign > 0) {
        add(g, degree, prefix, false);
        prefix = prefix * rho.images.at(g);
        degree += alpha.generator_exponent(l.generator);
      } else {
        prefix = prefix * rho.inverses.at(g);
        degree -= alpha.generator_exponent(l.generator);
        add(g, degree, prefix, true);
      }
    }
    for (std::size_t j = 0; j < gens; ++j) {
      std::vector<std::pair<int, CMatrix<R>>> terms(acc[j].begin(), acc[j].end());
      blocks.push_back(LaurentMatrix<R>::from_terms(n, n, terms));
    }
  }
  return FoxMatrix<R>(p.relator_count(), p.generator_count(), rho.dim, std::move(blocks));
}

template <class R>
WadaInvariant<R> wada_invariant(const Presentation& p, const SymPowerRep<R>& rho, const AlphaMap& alpha,
                                std::optional<int> column) {
  const FoxMatrix<R> fox = build_fox_matrix(p, rho, alpha);
  const int first = column.value_or(0);
  const int last = column ? *column + 1 : p.generator_count();
  if (first < 0 || last > p.generator_count()) throw InputError("deleted column out of range");
  for (int j = first; j < last; ++j) {
    GroupRingElement x_minus_one(Word::generator(j));
    x_minus_one.add_term(Word{}, -1);
    auto den_matrix = phi(rho, alpha, x_minus_one);
    auto den = laurent_det(den_matrix);
    if (den.is_zero()) continue;
    WadaInvariant<R> w;
    w.num_matrix = fox.without_column(j);
    w.num = laurent_det(w.num_matrix);
    w.den = std::move(den);
    w.den_matrix = std::move(den_matrix);
    w.deleted_index = j;
    w.dim = rho.dim;
    w.signs = rho.signs;
    return w;
  }
  throw DegenerateDenominator("denominator det phi(x_j - 1) vanishes identically for every admissible column; "
                              "the representation and alpha are incompatible with Wada's construction");
}

template <class R>
LimitValue<R> limit_value(const RationalFunction<R>& f, const Complex<R>& c, R tol) {
  if (c.is_zero()) throw DomainError("limit_value: point must be non-zero");
  LimitValue<R> out;
  if (f.num().is_zero()) {
    // Identically zero: report an infinite zero order as a large positive one.
    out.zero_order = 1 << 20;
    return out;
  }
  const auto num = deflate_at(f.num(), c, tol);
  const auto den = deflate_at(f.den(), c, tol);
  for (const auto* d : {&num, &den}) {
    if (d->rejected_residual > tol && d->rejected_residual <= R(10) * tol) {
      std::ostringstream os;
      os << "ambiguous deflation at the evaluation point: remainder ratio "
         << to_double(d->rejected_residual) << " is within a factor 10 of the tolerance "
         << to_double(tol) << "; rerun with extended precision (dd)";
      throw PrecisionEscalation(os.str());
    }
  }
  out.num_multiplicity = num.multiplicity;
  out.den_multiplicity = den.multiplicity;
  out.zero_order = num.multiplicity - den.multiplicity;
  out.max_accepted_residual = std::max(num.accepted_residual, den.accepted_residual);
  if (out.zero_order < 0) {
    throw PoleError("pole of order " + std::to_string(-out.zero_order) + " at the evaluation point");
  }
  if (out.zero_order == 0) out.value = poly_eval(num.quotient, c) / poly_eval(den.quotient, c);
  return out;
}

template <class R>
ConditionedProblem<R> loxodromic_substitution(int n, const Presentation& p, const AlphaMap& alpha,
                                              const Sl2Rep<R>& rho2, const SignAssignment& signs) {
  using C = Complex<R>;
  ConditionedProblem<R> out;
  out.presentation = p;
  out.alpha = alpha;
  out.rho = lift_rep(n, p, rho2, signs);
  const int g = p.generator_count();
  auto lifted = [&](int k) {
    const int eps = signs[p.generators()[static_cast<std::size_t>(k)].component];
    return rho2.images.at(static_cast<std::size_t>(k)) * C(R(eps));
  };
  double best = 1 + 1e-6;
  CMatrix<R> best_image;
  for (int j = 0; j < g; ++j) {
    for (int i = 0; i < g; ++i) {
      if (i == j) continue;
      const CMatrix<R> y = lifted(i) * lifted(j);
      // |mu| from the trace: mu = (tr + sqrt(tr^2 - 4)) / 2, choosing the larger root.
      const cdouble tr = complex_cast<double>(y.trace());
      const cdouble disc = tr * tr - cdouble(4.0);
      const double r = std::sqrt(to_double(abs(disc)));
      const double theta = std::atan2(disc.im, disc.re) / 2;
      const cdouble root(r * std::cos(theta), r * std::sin(theta));
      const double mu = std::max(to_double(abs(tr + root)), to_double(abs(tr - root))) / 2;
      if (mu > best * (1 + 1e-9)) {
        best = mu;
        out.source = i;
        out.replaced = j;
        best_image = y;
      }
    }
  }
  if (out.source < 0) return out;
  out.dominant_eigenvalue = best;
  const int src = out.source;
  const int rep = out.replaced;
  std::vector<Word> relators;
  for (const auto& r : p.relators()) {
    std::vector<Letter> letters;
    for (const auto& l : r.letters()) {
      if (l.generator != rep) {
        letters.push_back(l);
      } else if (l.sign > 0) {
        letters.push_back({src, -1});
        letters.push_back({rep, 1});
      } else {
        letters.push_back({rep, -1});
        letters.push_back({src, 1});
      }
    }
    relators.emplace_back(std::move(letters));
  }
  auto generators = p.generators();
  const auto& gs = p.generators();
  std::string name = gs[static_cast<std::size_t>(src)].name + "*" + gs[static_cast<std::size_t>(rep)].name;
  while (std::any_of(gs.begin(), gs.end(), [&](const Generator& x) { return x.name == name; })) name += "'";
  generators[static_cast<std::size_t>(rep)].name = name;
  out.presentation = Presentation(std::move(generators), std::move(relators));
  out.alpha = alpha.with_generator_exponent(rep, alpha.generator_exponent(src) + alpha.generator_exponent(rep));
  out.rho.images.at(static_cast<std::size_t>(rep)) = sym_power(n, best_image);
  // best_image has det 1 up to rounding, so its adjugate is the inverse.
  CMatrix<R> adj(2, 2);
  adj(0, 0) = best_image(1, 1);
  adj(0, 1) = -best_image(0, 1);
  adj(1, 0) = -best_image(1, 0);
  adj(1, 1) = best_image(0, 0);
  out.rho.inverses.at(static_cast<std::size_t>(rep)) = sym_power(n, adj);
  return out;
}

#define TWV_WADA_INSTANTIATE(R)                                                                            \
  template LaurentMatrix<R> phi<R>(const SymPowerRep<R>&, const AlphaMap&, const GroupRingElement&);       \
  template class FoxMatrix<R>;                                                                             \
  template FoxMatrix<R> build_fox_matrix<R>(const Presentation&, const SymPowerRep<R>&, const AlphaMap&);  \
  template WadaInvariant<R> wada_invariant<R>(const Presentation&, const SymPowerRep<R>&, const AlphaMap&,  \
                                              std::optional<int>);                                         \
  template LimitValue<R> limit_value<R>(const RationalFunction<R>&, const Complex<R>&, R);                 \
  template ConditionedProblem<R> loxodromic_substitution<R>(int, const Presentation&, const AlphaMap&,      \
                                                            const Sl2Rep<R>&, const SignAssignment&);

TWV_WADA_INSTANTIATE(double)
TWV_WADA_INSTANTIATE(quad)
TWV_WADA_INSTANTIATE(mp)

}  // namespace twv
