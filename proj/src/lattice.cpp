#include "ggibbs/lattice.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace ggibbs {

Site origin() { return Site{0, 0, 0, 0}; }
Site site1(int x) { return Site{x, 0, 0, 0}; }
Site site2(int x, int y) { return Site{x, y, 0, 0}; }
Site site3(int x, int y, int z) { return Site{x, y, z, 0}; }

Site add(const Site& a, const Site& b) {
  Site r{};
  for (int k = 0; k < kMaxDim; ++k) r[k] = a[k] + b[k];
  return r;
}

Site sub(const Site& a, const Site& b) {
  Site r{};
  for (int k = 0; k < kMaxDim; ++k) r[k] = a[k] - b[k];
  return r;
}

Site negate(const Site& a) {
  Site r{};
  for (int k = 0; k < kMaxDim; ++k) r[k] = -a[k];
  return r;
}

std::string site_str(const Site& s, int dim) {
  std::ostringstream os;
  os << "(";
  for (int k = 0; k < dim; ++k) os << (k ? "," : "") << s[k];
  os << ")";
  return os.str();
}

bool lex_le(const Site& a, const Site& b, int dim) {
  for (int k = 0; k < dim; ++k) {
    if (a[k] != b[k]) return a[k] < b[k];
  }
  return true;
}

bool lex_lt(const Site& a, const Site& b, int dim) {
  for (int k = 0; k < dim; ++k) {
    if (a[k] != b[k]) return a[k] < b[k];
  }
  return false;
}

int chebyshev(const Site& a, const Site& b, int dim) {
  int d = 0;
  for (int k = 0; k < dim; ++k) d = std::max(d, std::abs(a[k] - b[k]));
  return d;
}

void SpinAlphabet::validate() const {
  if (symbols.empty()) throw std::invalid_argument("alphabet: empty");
  if (plus_symbol < 0 || plus_symbol >= size())
    throw std::invalid_argument("alphabet: plus_symbol out of range");
  for (std::size_t i = 0; i < symbols.size(); ++i)
    for (std::size_t j = i + 1; j < symbols.size(); ++j)
      if (symbols[i] == symbols[j]) throw std::invalid_argument("alphabet: duplicate symbol");
}

SpinAlphabet SpinAlphabet::ising() { return SpinAlphabet{{"-", "+"}, 1}; }
SpinAlphabet SpinAlphabet::occupancy() { return SpinAlphabet{{"0", "1"}, 1}; }
SpinAlphabet SpinAlphabet::signed_field() { return SpinAlphabet{{"-", "0", "+"}, 2}; }

Window::Window(int dim, const Site& lo, const Site& hi) : dim_(dim), lo_(lo), hi_(hi) {
  if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("window: bad dimension");
  for (int k = 0; k < dim; ++k)
    if (lo[k] > hi[k]) throw std::invalid_argument("window: lo > hi");
  for (int k = dim; k < kMaxDim; ++k)
    if (lo[k] != 0 || hi[k] != 0) throw std::invalid_argument("window: inactive coordinate not 0");
  if (site_count() > kMaxWindowSites) throw std::invalid_argument("window: too many sites");
}

Window Window::interval(int lo, int hi) { return Window(1, site1(lo), site1(hi)); }
Window Window::box2(int lx, int ly, int hx, int hy) {
  return Window(2, site2(lx, ly), site2(hx, hy));
}
Window Window::cube(int dim, int n) {
  Site lo{}, hi{};
  for (int k = 0; k < dim; ++k) {
    lo[k] = -n;
    hi[k] = n;
  }
  return Window(dim, lo, hi);
}

std::int64_t Window::site_count() const {
  std::int64_t n = 1;
  for (int k = 0; k < dim_; ++k) n *= extent(k);
  return n;
}

bool Window::contains(const Site& s) const {
  for (int k = 0; k < dim_; ++k)
    if (s[k] < lo_[k] || s[k] > hi_[k]) return false;
  return true;
}

bool Window::contains_window(const Window& w) const {
  return dim_ == w.dim_ && contains(w.lo_) && contains(w.hi_);
}

std::int64_t Window::index_of(const Site& s) const {
  std::int64_t idx = 0;
  for (int k = 0; k < dim_; ++k) idx = idx * extent(k) + (s[k] - lo_[k]);
  return idx;
}

Site Window::site_at(std::int64_t idx) const {
  Site s{};
  for (int k = dim_ - 1; k >= 0; --k) {
    s[k] = lo_[k] + static_cast<int>(idx % extent(k));
    idx /= extent(k);
  }
  return s;
}

Window Window::expanded(int r) const {
  Site lo = lo_, hi = hi_;
  for (int k = 0; k < dim_; ++k) {
    lo[k] -= r;
    hi[k] += r;
  }
  return Window(dim_, lo, hi);
}

Window Window::translated(const Site& x) const {
  Site lo = lo_, hi = hi_;
  for (int k = 0; k < dim_; ++k) {
    lo[k] += x[k];
    hi[k] += x[k];
  }
  return Window(dim_, lo, hi);
}

std::vector<Site> Window::sites() const {
  std::vector<Site> out;
  out.reserve(static_cast<std::size_t>(site_count()));
  for (std::int64_t i = 0; i < site_count(); ++i) out.push_back(site_at(i));
  return out;
}

std::vector<Site> Window::sites_outside(const Window& inner) const {
  std::vector<Site> out;
  for (std::int64_t i = 0; i < site_count(); ++i) {
    Site s = site_at(i);
    if (!inner.contains(s)) out.push_back(s);
  }
  return out;
}

Site Window::wrap(const Site& s) const {
  Site r = s;
  for (int k = 0; k < dim_; ++k) {
    int e = extent(k);
    int d = (s[k] - lo_[k]) % e;
    if (d < 0) d += e;
    r[k] = lo_[k] + d;
  }
  return r;
}

Site Window::lex_min_site() const { return lo_; }
Site Window::lex_max_site() const { return hi_; }

Exterior Exterior::constant_rule(int symbol) {
  Exterior e;
  e.kind = Kind::Constant;
  e.constant = static_cast<std::uint8_t>(symbol);
  return e;
}

Exterior Exterior::lex_split(const Site& cut, int below, int above) {
  if (below == above) return constant_rule(below);  // degenerate split
  Exterior e;
  e.kind = Kind::LexSplit;
  e.cut = cut;
  e.below = static_cast<std::uint8_t>(below);
  e.above = static_cast<std::uint8_t>(above);
  return e;
}

int Exterior::value_at(const Site& s, int dim) const {
  if (kind == Kind::Constant) return constant;
  return lex_le(s, cut, dim) ? below : above;
}

int Exterior::lower_value() const {
  if (kind == Kind::Constant) return constant;
  if (cut == origin()) return below;
  throw std::logic_error("exterior: not constant on the lower lex half");
}

int Exterior::upper_value() const {
  if (kind == Kind::Constant) return constant;
  if (cut == origin()) return above;
  throw std::logic_error("exterior: not constant on the upper lex half");
}

Configuration::Configuration(Window win, SpinAlphabet alphabet, std::vector<std::uint8_t> values,
                             Exterior exterior)
    : win_(win), alphabet_(std::move(alphabet)), vals_(std::move(values)), ext_(exterior) {
  alphabet_.validate();
  if (static_cast<std::int64_t>(vals_.size()) != win_.site_count())
    throw std::invalid_argument("configuration: value count != site count");
  for (auto v : vals_)
    if (v >= alphabet_.size()) throw std::invalid_argument("configuration: symbol out of range");
}

Configuration Configuration::constant(const Window& win, const SpinAlphabet& alphabet,
                                      int symbol) {
  std::vector<std::uint8_t> vals(static_cast<std::size_t>(win.site_count()),
                                 static_cast<std::uint8_t>(symbol));
  return Configuration(win, alphabet, std::move(vals), Exterior::constant_rule(symbol));
}

int Configuration::value_at(const Site& s) const {
  if (win_.contains(s)) return vals_[static_cast<std::size_t>(win_.index_of(s))];
  return ext_.value_at(s, win_.dim());
}

void Configuration::set_value(const Site& s, int symbol) {
  if (!win_.contains(s)) throw std::invalid_argument("set_value: site outside window");
  vals_[static_cast<std::size_t>(win_.index_of(s))] = static_cast<std::uint8_t>(symbol);
}

bool Configuration::all_equal(int symbol) const {
  for (auto v : vals_)
    if (v != symbol) return false;
  return true;
}

bool Configuration::same_ambient(const Configuration& other) const {
  return win_ == other.win_ && alphabet_ == other.alphabet_;
}

Configuration concat(const Configuration& sigma, const Configuration& omega,
                     const Window& volume) {
  if (!sigma.same_ambient(omega)) throw std::invalid_argument("concat: ambient mismatch");
  if (!sigma.window().contains_window(volume))
    throw std::invalid_argument("concat: volume not contained in ambient window");
  const Window& w = sigma.window();
  std::vector<std::uint8_t> vals(static_cast<std::size_t>(w.site_count()));
  for (std::int64_t i = 0; i < w.site_count(); ++i) {
    Site s = w.site_at(i);
    vals[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(
        volume.contains(s) ? sigma.value_index(i) : omega.value_index(i));
  }
  return Configuration(w, sigma.alphabet(), std::move(vals), omega.exterior());
}

Configuration plus_splice(const Configuration& sigma) {
  const Window& w = sigma.window();
  const int plus = sigma.alphabet().plus_symbol;
  std::vector<std::uint8_t> vals(static_cast<std::size_t>(w.site_count()));
  for (std::int64_t i = 0; i < w.site_count(); ++i) {
    Site s = w.site_at(i);
    vals[static_cast<std::size_t>(i)] =
        static_cast<std::uint8_t>(lex_le(s, origin(), w.dim()) ? sigma.value_index(i) : plus);
  }
  Exterior ext = Exterior::lex_split(origin(), sigma.exterior().lower_value(), plus);
  return Configuration(w, sigma.alphabet(), std::move(vals), ext);
}

Configuration xi_splice(const Configuration& sigma, const Configuration& xi) {
  if (!sigma.same_ambient(xi)) throw std::invalid_argument("xi_splice: window mismatch");
  const Window& w = sigma.window();
  std::vector<std::uint8_t> vals(static_cast<std::size_t>(w.site_count()));
  for (std::int64_t i = 0; i < w.site_count(); ++i) {
    Site s = w.site_at(i);
    vals[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(
        lex_le(s, origin(), w.dim()) ? sigma.value_index(i) : xi.value_index(i));
  }
  Exterior ext = Exterior::lex_split(origin(), sigma.exterior().lower_value(),
                                     xi.exterior().upper_value());
  return Configuration(w, sigma.alphabet(), std::move(vals), ext);
}

Configuration telescope_config(const Window& volume, const Site& x,
                               const Configuration& sigma, const Configuration& omega) {
  if (!volume.contains(x)) throw std::invalid_argument("telescope_config: x outside volume");
  if (!sigma.same_ambient(omega)) throw std::invalid_argument("telescope_config: ambient mismatch");
  if (!sigma.window().contains_window(volume))
    throw std::invalid_argument("telescope_config: volume not in ambient window");
  const Window& w = sigma.window();
  const int plus = sigma.alphabet().plus_symbol;
  std::vector<std::uint8_t> vals(static_cast<std::size_t>(w.site_count()));
  for (std::int64_t i = 0; i < w.site_count(); ++i) {
    Site s = w.site_at(i);
    std::uint8_t v;
    if (!volume.contains(s))
      v = static_cast<std::uint8_t>(omega.value_index(i));
    else if (lex_le(s, x, w.dim()))
      v = static_cast<std::uint8_t>(sigma.value_index(i));
    else
      v = static_cast<std::uint8_t>(plus);
    vals[static_cast<std::size_t>(i)] = v;
  }
  return Configuration(w, sigma.alphabet(), std::move(vals), omega.exterior());
}

Configuration translate(const Configuration& sigma, const Site& x) {
  Window w = sigma.window().translated(negate(x));
  Exterior ext = sigma.exterior();
  if (ext.kind == Exterior::Kind::LexSplit) ext.cut = sub(ext.cut, x);
  return Configuration(w, sigma.alphabet(), sigma.values(), ext);
}

std::int64_t state_count(int q, std::int64_t nsites) {
  std::int64_t n = 1;
  const std::int64_t cap = std::int64_t{1} << 24;
  for (std::int64_t i = 0; i < nsites; ++i) {
    n *= q;
    if (n > cap) throw std::runtime_error("state space too large");
  }
  return n;
}

void decode_state(std::int64_t state, int q, std::int64_t nsites, std::uint8_t* out) {
  for (std::int64_t k = 0; k < nsites; ++k) {
    out[k] = static_cast<std::uint8_t>(state % q);
    state /= q;
  }
}

std::int64_t encode_state(int q, std::int64_t nsites, const std::uint8_t* vals) {
  std::int64_t state = 0;
  for (std::int64_t k = nsites - 1; k >= 0; --k) state = state * q + vals[k];
  return state;
}

}  // namespace ggibbs
