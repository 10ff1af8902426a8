#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace ggibbs {

inline constexpr int kMaxDim = 4;
inline constexpr std::int64_t kMaxWindowSites = std::int64_t{1} << 24;

// A lattice site. Coordinates beyond the active dimension must stay zero so
// that value comparisons work across the whole array.
using Site = std::array<int, kMaxDim>;

Site origin();
Site site1(int x);
Site site2(int x, int y);
Site site3(int x, int y, int z);
Site add(const Site& a, const Site& b);
Site sub(const Site& a, const Site& b);
Site negate(const Site& a);
std::string site_str(const Site& s, int dim);

// Lexicographic order: coordinate 1 decides first, then 2, ..., then d.
bool lex_le(const Site& a, const Site& b, int dim);
bool lex_lt(const Site& a, const Site& b, int dim);

int chebyshev(const Site& a, const Site& b, int dim);

struct SpinAlphabet {
  std::vector<std::string> symbols;
  int plus_symbol = 0;  // index of the distinguished "+1" symbol

  int size() const { return static_cast<int>(symbols.size()); }
  void validate() const;
  bool operator==(const SpinAlphabet&) const = default;

  // {-,+} with + distinguished; index order is the FKG order.
  static SpinAlphabet ising();
  // {0,1} occupancy variables, 1 distinguished
  static SpinAlphabet occupancy();
  // {-,0,+} for fields like the GriSing xi
  static SpinAlphabet signed_field();
};

// Closed finite box [lo, hi] in Z^d.
class Window {
 public:
  Window() = default;
  Window(int dim, const Site& lo, const Site& hi);
  static Window interval(int lo, int hi);               // d = 1
  static Window box2(int lx, int ly, int hx, int hy);   // d = 2
  static Window cube(int dim, int n);                   // [-n, n]^d

  int dim() const { return dim_; }
  const Site& lo() const { return lo_; }
  const Site& hi() const { return hi_; }
  int extent(int k) const { return hi_[k] - lo_[k] + 1; }
  std::int64_t site_count() const;
  bool contains(const Site& s) const;
  bool contains_window(const Window& w) const;
  std::int64_t index_of(const Site& s) const;  // row-major, first coordinate slowest
  Site site_at(std::int64_t idx) const;
  Window expanded(int r) const;
  Window translated(const Site& x) const;
  std::vector<Site> sites() const;
  // sites of `this` not in `inner`
  std::vector<Site> sites_outside(const Window& inner) const;
  Site wrap(const Site& s) const;  // periodic image inside the box
  Site lex_min_site() const;
  Site lex_max_site() const;

  bool operator==(const Window&) const = default;

 private:
  int dim_ = 1;
  Site lo_{};
  Site hi_{};
};

// Exterior rule: determines symbols at every site outside a configuration's
// window. LexSplit covers the spliced configurations sigma^+ and sigma^xi.
struct Exterior {
  enum class Kind { Constant, LexSplit };
  Kind kind = Kind::Constant;
  std::uint8_t constant = 0;
  Site cut{};
  std::uint8_t below = 0;
  std::uint8_t above = 0;

  static Exterior constant_rule(int symbol);
  static Exterior lex_split(const Site& cut, int below, int above);
  int value_at(const Site& s, int dim) const;
  // constant value taken on {x <= origin} / {x > origin}; throws if the rule
  // is not constant there (only origin cuts arise in practice)
  int lower_value() const;
  int upper_value() const;
  bool operator==(const Exterior&) const = default;
};

// Spin assignment on a window plus a total exterior rule, so every site of
// Z^d resolves to a symbol.
class Configuration {
 public:
  Configuration() = default;
  Configuration(Window win, SpinAlphabet alphabet, std::vector<std::uint8_t> values,
                Exterior exterior);
  static Configuration constant(const Window& win, const SpinAlphabet& alphabet, int symbol);

  const Window& window() const { return win_; }
  const SpinAlphabet& alphabet() const { return alphabet_; }
  const std::vector<std::uint8_t>& values() const { return vals_; }
  const Exterior& exterior() const { return ext_; }

  int value_at(const Site& s) const;
  int value_index(std::int64_t idx) const { return vals_[static_cast<std::size_t>(idx)]; }
  void set_value(const Site& s, int symbol);
  bool all_equal(int symbol) const;

  bool same_ambient(const Configuration& other) const;
  bool operator==(const Configuration&) const = default;

 private:
  Window win_;
  SpinAlphabet alphabet_;
  std::vector<std::uint8_t> vals_;
  Exterior ext_;
};

// sigma_Lambda omega_{Lambda^c}: result agrees with sigma on `volume` and
// with omega elsewhere (window values and exterior rule).
Configuration concat(const Configuration& sigma, const Configuration& omega,
                     const Window& volume);

// sigma^+(x) = sigma(x) for x <= 0, plus for x > 0 (lexicographic order).
Configuration plus_splice(const Configuration& sigma);

// sigma^xi(x) = sigma(x) for x <= 0, xi(x) for x > 0.
Configuration xi_splice(const Configuration& sigma, const Configuration& xi);

// Telescoping configuration: omega outside volume, sigma at y <= x inside,
// plus at y > x inside.
Configuration telescope_config(const Window& volume, const Site& x,
                               const Configuration& sigma, const Configuration& omega);

// (tau_x sigma)(y) = sigma(x + y); the window shifts by -x.
Configuration translate(const Configuration& sigma, const Site& x);

// Mixed-radix state indexing over a window: state = sum_k value[k] * q^k with
// k the row-major site index (site 0 is the least significant digit).
std::int64_t state_count(int q, std::int64_t nsites);
void decode_state(std::int64_t state, int q, std::int64_t nsites, std::uint8_t* out);
std::int64_t encode_state(int q, std::int64_t nsites, const std::uint8_t* vals);

}  // namespace ggibbs
