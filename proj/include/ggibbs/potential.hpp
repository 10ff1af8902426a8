#pragma once

#include <optional>
#include <vector>

#include "ggibbs/lattice.hpp"

namespace ggibbs {

// Finite site set; for translation-invariant generators it is a base shape
// containing the origin. Sites are kept sorted lexicographically.
struct Shape {
  std::vector<Site> sites;

  explicit Shape(std::vector<Site> s, int dim);
  int size() const { return static_cast<int>(sites.size()); }
  int diameter(int dim) const;
  bool contains(const Site& s) const;
};

// One interaction term Phi_A: a real table over the q^|A| symbol assignments
// of its shape, indexed little-endian in shape site order.
struct Term {
  Shape shape;
  std::vector<double> table;

  Term(Shape s, std::vector<double> t, int q);
  double sup_abs() const;
};

struct UacReport {
  double per_site_norm = 0.0;
  int truncation_radius = 0;
};

// Interaction family. Translation-invariant terms are stored as base-shape
// generators (shape contains 0, one per orbit); quenched terms are anchored
// at absolute sites and evaluated only there.
class Potential {
 public:
  enum class Kind { TranslationInvariant, Quenched };

  Potential(int q, int dim) : q_(q), dim_(dim) {}

  void add_ti_term(std::vector<Site> base_sites, std::vector<double> table);
  void add_anchored_term(const Site& anchor, std::vector<Site> base_sites,
                         std::vector<double> table);

  int q() const { return q_; }
  int dim() const { return dim_; }
  int range() const { return range_; }
  Kind kind() const {
    return anchored_.empty() ? Kind::TranslationInvariant : Kind::Quenched;
  }
  const std::vector<Term>& ti_terms() const { return ti_; }
  struct Anchored {
    Site anchor;
    Term term;
  };
  const std::vector<Anchored>& anchored_terms() const { return anchored_; }

  // All terms whose absolute site set meets `volume`, as (term, absolute sites).
  struct Instance {
    const Term* term;
    std::vector<Site> abs_sites;
    bool inside;  // all sites contained in volume
  };
  std::vector<Instance> instances_meeting(const Window& volume) const;

 private:
  int q_;
  int dim_;
  int range_ = 0;
  std::vector<Term> ti_;
  std::vector<Anchored> anchored_;
};

// Boundary condition for Hamiltonians and partition functions.
struct Boundary {
  enum class Kind { Fixed, Free, Periodic };
  Kind kind = Kind::Free;
  std::optional<Configuration> omega;  // Fixed only

  static Boundary fixed(Configuration w);
  static Boundary free_bc();
  static Boundary periodic();
  // Fixed all-`symbol` boundary on (volume directly; values are irrelevant,
  // only the exterior rule is read)
  static Boundary constant(const Window& volume, const SpinAlphabet& alphabet, int symbol);
};

// Energy of the interior assignment with the boundary resolved up front, for
// tight enumeration loops. Interior values are indexed by volume site order.
class CompiledEnergy {
 public:
  CompiledEnergy(const Potential& phi, const Window& volume, const Boundary& bc);

  double energy(const std::uint8_t* interior_vals) const;
  std::int64_t n_sites() const { return nsites_; }

 private:
  struct CTerm {
    const std::vector<double>* table;
    // per shape site: local volume index, or -1 with the fixed symbol
    std::vector<int> local;
    std::vector<std::uint8_t> fixed;
    std::vector<std::int64_t> stride;  // q^k per slot
  };
  std::vector<CTerm> terms_;
  std::int64_t nsites_ = 0;
};

// H_Lambda(sigma | omega) = sum over terms meeting Lambda, with sigma inside
// and omega outside (both configurations on a common ambient window).
double hamiltonian(const Potential& phi, const Window& volume, const Configuration& sigma,
                   const Configuration& omega);
// Same with an explicit boundary condition; sigma provides the interior.
double hamiltonian(const Potential& phi, const Window& volume, const Configuration& sigma,
                   const Boundary& bc);

UacReport uac_norm(const Potential& phi);

// Phi^(R): terms with diameter <= R survive unchanged, the rest are dropped.
Potential truncate(const Potential& phi, int R);

double log_partition(const Potential& phi, const Window& volume, const Boundary& bc);

// --- model constructors -----------------------------------------------------

// spin value of an alphabet index under the +-1 convention (0 -> -1, 1 -> +1)
double ising_value(int symbol);

// nearest-neighbour Ising in d dimensions: Phi_{x,x+e} = -beta s s',
// Phi_{x} = -h s, binary alphabet {-,+}.
Potential ising_potential(int dim, double beta, double h);

Potential zero_potential(int q, int dim);

// single-site tilt Phi_{x}(a) = -log weights[a]; its Gibbs measure is the
// product measure with the normalized weights
Potential product_potential(const std::vector<double>& weights, int dim);

}  // namespace ggibbs
