#include "ggibbs/potential.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ggibbs/parallel.hpp"

namespace ggibbs {

Shape::Shape(std::vector<Site> s, int dim) : sites(std::move(s)) {
  if (sites.empty()) throw std::invalid_argument("shape: empty");
  std::sort(sites.begin(), sites.end(),
            [dim](const Site& a, const Site& b) { return lex_lt(a, b, dim); });
  for (std::size_t i = 0; i + 1 < sites.size(); ++i)
    if (sites[i] == sites[i + 1]) throw std::invalid_argument("shape: duplicate site");
}

int Shape::diameter(int dim) const {
  int d = 0;
  for (const auto& a : sites)
    for (const auto& b : sites) d = std::max(d, chebyshev(a, b, dim));
  return d;
}

bool Shape::contains(const Site& s) const {
  return std::find(sites.begin(), sites.end(), s) != sites.end();
}

Term::Term(Shape s, std::vector<double> t, int q) : shape(std::move(s)), table(std::move(t)) {
  std::int64_t expect = 1;
  for (int i = 0; i < shape.size(); ++i) expect *= q;
  if (static_cast<std::int64_t>(table.size()) != expect)
    throw std::invalid_argument("term: table size != q^|shape|");
}

double Term::sup_abs() const {
  double m = 0.0;
  for (double v : table) m = std::max(m, std::abs(v));
  return m;
}

namespace {

// Shapes are stored lex-sorted; remap the table so entry lookups agree with
// the sorted site order even if the caller listed sites differently.
std::vector<double> sort_remap_table(std::vector<Site>& sites, std::vector<double> table, int q,
                                     int dim) {
  const int k = static_cast<int>(sites.size());
  std::vector<int> perm(k);
  for (int i = 0; i < k; ++i) perm[i] = i;
  std::stable_sort(perm.begin(), perm.end(),
                   [&](int a, int b) { return lex_lt(sites[a], sites[b], dim); });
  bool identity = true;
  for (int i = 0; i < k; ++i)
    if (perm[i] != i) identity = false;
  if (identity) return table;
  std::vector<Site> sorted(k);
  for (int i = 0; i < k; ++i) sorted[i] = sites[perm[i]];
  std::vector<std::int64_t> old_stride(k);
  {
    std::vector<std::int64_t> s(k);
    std::int64_t acc = 1;
    for (int i = 0; i < k; ++i) {
      s[i] = acc;
      acc *= q;
    }
    for (int i = 0; i < k; ++i) old_stride[i] = s[perm[i]];
  }
  std::vector<double> out(table.size());
  std::vector<int> digits(k, 0);
  for (std::size_t newidx = 0; newidx < table.size(); ++newidx) {
    std::int64_t oldidx = 0;
    for (int i = 0; i < k; ++i) oldidx += old_stride[i] * digits[i];
    out[newidx] = table[static_cast<std::size_t>(oldidx)];
    for (int i = 0; i < k; ++i) {
      if (++digits[i] < q) break;
      digits[i] = 0;
    }
  }
  sites = std::move(sorted);
  return out;
}

}  // namespace

void Potential::add_ti_term(std::vector<Site> base_sites, std::vector<double> table) {
  table = sort_remap_table(base_sites, std::move(table), q_, dim_);
  Shape sh(std::move(base_sites), dim_);
  if (!sh.contains(origin()))
    throw std::invalid_argument("potential: base shape must contain the origin");
  range_ = std::max(range_, sh.diameter(dim_));
  ti_.emplace_back(Term(std::move(sh), std::move(table), q_));
}

void Potential::add_anchored_term(const Site& anchor, std::vector<Site> base_sites,
                                  std::vector<double> table) {
  table = sort_remap_table(base_sites, std::move(table), q_, dim_);
  Shape sh(std::move(base_sites), dim_);
  range_ = std::max(range_, sh.diameter(dim_));
  anchored_.push_back(Anchored{anchor, Term(std::move(sh), std::move(table), q_)});
}

std::vector<Potential::Instance> Potential::instances_meeting(const Window& volume) const {
  std::vector<Instance> out;
  // translation-invariant generators: anchors range over the r-expanded box,
  // each translate counted once by its anchor
  if (!ti_.empty()) {
    Window anchors = volume.expanded(range_);
    for (std::int64_t i = 0; i < anchors.site_count(); ++i) {
      Site x = anchors.site_at(i);
      for (const Term& t : ti_) {
        bool meets = false, inside = true;
        std::vector<Site> abs;
        abs.reserve(t.shape.sites.size());
        for (const Site& b : t.shape.sites) {
          Site s = add(b, x);
          abs.push_back(s);
          if (volume.contains(s))
            meets = true;
          else
            inside = false;
        }
        if (meets) out.push_back(Instance{&t, std::move(abs), inside});
      }
    }
  }
  for (const auto& a : anchored_) {
    bool meets = false, inside = true;
    std::vector<Site> abs;
    abs.reserve(a.term.shape.sites.size());
    for (const Site& b : a.term.shape.sites) {
      Site s = add(b, a.anchor);
      abs.push_back(s);
      if (volume.contains(s))
        meets = true;
      else
        inside = false;
    }
    if (meets) out.push_back(Instance{&a.term, std::move(abs), inside});
  }
  return out;
}

Boundary Boundary::fixed(Configuration w) {
  Boundary b;
  b.kind = Kind::Fixed;
  b.omega = std::move(w);
  return b;
}

Boundary Boundary::free_bc() { return Boundary{}; }

Boundary Boundary::periodic() {
  Boundary b;
  b.kind = Kind::Periodic;
  return b;
}

Boundary Boundary::constant(const Window& volume, const SpinAlphabet& alphabet, int symbol) {
  return fixed(Configuration::constant(volume, alphabet, symbol));
}

CompiledEnergy::CompiledEnergy(const Potential& phi, const Window& volume, const Boundary& bc)
    : nsites_(volume.site_count()) {
  if (bc.kind == Boundary::Kind::Periodic) {
    // every translate anchored in the window, sites wrapped into the box
    for (const Term& t : phi.ti_terms()) {
      for (std::int64_t i = 0; i < volume.site_count(); ++i) {
        Site x = volume.site_at(i);
        CTerm ct;
        ct.table = &t.table;
        std::int64_t stride = 1;
        for (const Site& b : t.shape.sites) {
          Site s = volume.wrap(add(b, x));
          ct.local.push_back(static_cast<int>(volume.index_of(s)));
          ct.fixed.push_back(0);
          ct.stride.push_back(stride);
          stride *= phi.q();
        }
        terms_.push_back(std::move(ct));
      }
    }
    if (!phi.anchored_terms().empty())
      throw std::invalid_argument("periodic boundary needs a translation-invariant potential");
    return;
  }

  const bool free_bc = bc.kind == Boundary::Kind::Free;
  for (const auto& inst : phi.instances_meeting(volume)) {
    if (free_bc && !inst.inside) continue;  // free b.c. keeps A subset Lambda only
    CTerm ct;
    ct.table = &inst.term->table;
    std::int64_t stride = 1;
    for (const Site& s : inst.abs_sites) {
      if (volume.contains(s)) {
        ct.local.push_back(static_cast<int>(volume.index_of(s)));
        ct.fixed.push_back(0);
      } else {
        ct.local.push_back(-1);
        ct.fixed.push_back(static_cast<std::uint8_t>(bc.omega->value_at(s)));
      }
      ct.stride.push_back(stride);
      stride *= phi.q();
    }
    terms_.push_back(std::move(ct));
  }
}

double CompiledEnergy::energy(const std::uint8_t* vals) const {
  double e = 0.0;
  for (const CTerm& ct : terms_) {
    std::int64_t idx = 0;
    for (std::size_t k = 0; k < ct.local.size(); ++k) {
      int v = ct.local[k] >= 0 ? vals[ct.local[k]] : ct.fixed[k];
      idx += ct.stride[k] * v;
    }
    e += (*ct.table)[static_cast<std::size_t>(idx)];
  }
  return e;
}

double hamiltonian(const Potential& phi, const Window& volume, const Configuration& sigma,
                   const Configuration& omega) {
  if (!sigma.same_ambient(omega)) throw std::invalid_argument("hamiltonian: ambient mismatch");
  if (!sigma.window().contains_window(volume))
    throw std::invalid_argument("hamiltonian: volume not in ambient window");
  double e = 0.0;
  for (const auto& inst : phi.instances_meeting(volume)) {
    std::int64_t idx = 0, stride = 1;
    for (const Site& s : inst.abs_sites) {
      int v = volume.contains(s) ? sigma.value_at(s) : omega.value_at(s);
      idx += stride * v;
      stride *= phi.q();
    }
    e += inst.term->table[static_cast<std::size_t>(idx)];
  }
  return e;
}

double hamiltonian(const Potential& phi, const Window& volume, const Configuration& sigma,
                   const Boundary& bc) {
  CompiledEnergy ce(phi, volume, bc);
  std::vector<std::uint8_t> vals(static_cast<std::size_t>(volume.site_count()));
  for (std::int64_t i = 0; i < volume.site_count(); ++i)
    vals[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(sigma.value_at(volume.site_at(i)));
  return ce.energy(vals.data());
}

UacReport uac_norm(const Potential& phi) {
  UacReport rep;
  rep.truncation_radius = phi.range();
  double n = 0.0;
  // a base shape B contributes one translate through each of its |B| sites
  for (const Term& t : phi.ti_terms()) n += t.shape.size() * t.sup_abs();
  if (!phi.anchored_terms().empty()) {
    // quenched part: uniform per-site norm sup_x sum_{A ni x} sup|Phi_A|
    std::vector<std::pair<Site, double>> per_site;
    for (const auto& a : phi.anchored_terms()) {
      double s = a.term.sup_abs();
      for (const Site& b : a.term.shape.sites) {
        Site x = add(b, a.anchor);
        auto it = std::find_if(per_site.begin(), per_site.end(),
                               [&](const auto& p) { return p.first == x; });
        if (it == per_site.end())
          per_site.emplace_back(x, s);
        else
          it->second += s;
      }
    }
    double m = 0.0;
    for (const auto& p : per_site) m = std::max(m, p.second);
    n += m;
  }
  rep.per_site_norm = n;
  return rep;
}

Potential truncate(const Potential& phi, int R) {
  if (R < 0) throw std::invalid_argument("truncate: R < 0");
  Potential out(phi.q(), phi.dim());
  for (const Term& t : phi.ti_terms())
    if (t.shape.diameter(phi.dim()) <= R) out.add_ti_term(t.shape.sites, t.table);
  for (const auto& a : phi.anchored_terms())
    if (a.term.shape.diameter(phi.dim()) <= R)
      out.add_anchored_term(a.anchor, a.term.shape.sites, a.term.table);
  return out;
}

double log_partition(const Potential& phi, const Window& volume, const Boundary& bc) {
  const std::int64_t n = volume.site_count();
  if (n > 64) throw std::runtime_error("state space too large");
  const std::int64_t nstates = state_count(phi.q(), n);
  CompiledEnergy ce(phi, volume, bc);
  const int q = phi.q();
  return par::logsumexp(nstates, [&](std::int64_t s) {
    std::uint8_t vals[64];
    decode_state(s, q, n, vals);
    return -ce.energy(vals);
  });
}

double ising_value(int symbol) { return symbol == 0 ? -1.0 : 1.0; }

Potential ising_potential(int dim, double beta, double h) {
  Potential phi(2, dim);
  for (int k = 0; k < dim; ++k) {
    Site e{};
    e[k] = 1;
    std::vector<double> tab(4);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) tab[a + 2 * b] = -beta * ising_value(a) * ising_value(b);
    phi.add_ti_term({origin(), e}, std::move(tab));
  }
  if (h != 0.0) {
    std::vector<double> tab(2);
    for (int a = 0; a < 2; ++a) tab[a] = -h * ising_value(a);
    phi.add_ti_term({origin()}, std::move(tab));
  }
  return phi;
}

Potential zero_potential(int q, int dim) { return Potential(q, dim); }

Potential product_potential(const std::vector<double>& weights, int dim) {
  Potential phi(static_cast<int>(weights.size()), dim);
  std::vector<double> tab;
  for (double w : weights) {
    if (!(w > 0)) throw std::invalid_argument("product_potential: weights must be positive");
    tab.push_back(-std::log(w));
  }
  phi.add_ti_term({origin()}, std::move(tab));
  return phi;
}

}  // namespace ggibbs
