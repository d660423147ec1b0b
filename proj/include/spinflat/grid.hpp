#pragma once

// Rectangular grids over a domain U in C and fields sampled on them, with
// finite differences (second-order central in the interior, one-sided at the
// edges).

#include <cmath>
#include <complex>
#include <cstddef>
#include <sstream>
#include <vector>

#include "spinflat/errors.hpp"

namespace spinflat {

struct GridDomain {
  double x_min = 0, x_max = 1, y_min = 0, y_max = 1;
  std::size_t nx = 3, ny = 3;

  GridDomain() = default;
  GridDomain(double x0, double x1, double y0, double y1, std::size_t nx_, std::size_t ny_)
      : x_min(x0), x_max(x1), y_min(y0), y_max(y1), nx(nx_), ny(ny_) {
    validate();
  }

  // Throws InvalidGrid.
  void validate() const {
    if (!(x_min < x_max) || !(y_min < y_max) || nx < 3 || ny < 3) {
      std::ostringstream os;
      os << "invalid grid [" << x_min << ", " << x_max << "] x [" << y_min << ", " << y_max
         << "] with " << nx << " x " << ny << " nodes (need min < max and >= 3 nodes per axis)";
      throw InvalidGrid(os.str());
    }
  }

  double hx() const { return (x_max - x_min) / static_cast<double>(nx - 1); }
  double hy() const { return (y_max - y_min) / static_cast<double>(ny - 1); }
  double h() const { return std::max(hx(), hy()); }
  double x(std::size_t j) const { return x_min + static_cast<double>(j) * hx(); }
  double y(std::size_t k) const { return y_min + static_cast<double>(k) * hy(); }
  std::complex<double> z(std::size_t j, std::size_t k) const { return {x(j), y(k)}; }
  std::size_t size() const { return nx * ny; }
  bool interior(std::size_t j, std::size_t k) const {
    return j > 0 && k > 0 && j + 1 < nx && k + 1 < ny;
  }

  // Same rectangle with (n - 1) * factor + 1 nodes per axis.
  GridDomain refined(std::size_t factor) const {
    return GridDomain(x_min, x_max, y_min, y_max, (nx - 1) * factor + 1, (ny - 1) * factor + 1);
  }

  friend bool operator==(const GridDomain&, const GridDomain&) = default;
};

// Values of T on the nodes of a grid, stored with j (x index) fastest.
template <typename T>
class GridField {
 public:
  GridField() = default;
  GridField(std::size_t nx, std::size_t ny, const T& init = T{})
      : nx_(nx), ny_(ny), data_(nx * ny, init) {}
  explicit GridField(const GridDomain& g, const T& init = T{}) : GridField(g.nx, g.ny, init) {}

  std::size_t nx() const { return nx_; }
  std::size_t ny() const { return ny_; }
  std::size_t size() const { return data_.size(); }

  T& operator()(std::size_t j, std::size_t k) { return data_[k * nx_ + j]; }
  const T& operator()(std::size_t j, std::size_t k) const { return data_[k * nx_ + j]; }

  const std::vector<T>& data() const { return data_; }
  std::vector<T>& data() { return data_; }

  template <typename Fn>
  auto map(Fn&& fn) const -> GridField<decltype(fn(std::declval<const T&>()))> {
    GridField<decltype(fn(std::declval<const T&>()))> out(nx_, ny_);
    for (std::size_t i = 0; i < data_.size(); ++i) out.data()[i] = fn(data_[i]);
    return out;
  }

 private:
  std::size_t nx_ = 0, ny_ = 0;
  std::vector<T> data_;
};

// Samples fn(j, k) on every node.
template <typename Fn>
auto sample(const GridDomain& g, Fn&& fn) -> GridField<decltype(fn(std::size_t{}, std::size_t{}))> {
  GridField<decltype(fn(std::size_t{}, std::size_t{}))> out(g);
  for (std::size_t k = 0; k < g.ny; ++k)
    for (std::size_t j = 0; j < g.nx; ++j) out(j, k) = fn(j, k);
  return out;
}

namespace fd {

// First derivative along one line of n >= 3 samples at spacing h, sample m.
// For n >= 4 the border stencil (-4, 7, -4, 1) / 2h carries the same leading
// error h^2 f'''/6 as the central one. Fields built from these derivatives
// (Gauss map, metric) get differenced again, and a jump in the error between
// border and interior would become an O(h) error at the neighbouring node.
template <typename T, typename Get>
T first(Get&& f, std::size_t m, std::size_t n, double h) {
  if (n >= 4 && (m == 0 || m + 1 == n)) {
    const double s = (m == 0 ? 1.0 : -1.0) / (2.0 * h);
    auto g = [&](std::size_t i) { return m == 0 ? f(i) : f(n - 1 - i); };
    return (-4.0 * g(0) + 7.0 * g(1) - 4.0 * g(2) + g(3)) * s;
  }
  if (m == 0) return (-3.0 * f(0) + 4.0 * f(1) - 1.0 * f(2)) * (1.0 / (2.0 * h));
  if (m + 1 == n) return (3.0 * f(n - 1) - 4.0 * f(n - 2) + 1.0 * f(n - 3)) * (1.0 / (2.0 * h));
  return (f(m + 1) - f(m - 1)) * (1.0 / (2.0 * h));
}

// Fourth-order first derivative at an interior sample 0 < m < n - 1: the
// centred 5-point stencil, shifted by one next to the border. Falls back to
// the 3-point central difference when n < 5.
template <typename T, typename Get>
T first4(Get&& f, std::size_t m, std::size_t n, double h) {
  if (n < 5) return (f(m + 1) - f(m - 1)) * (1.0 / (2.0 * h));
  const double s = 1.0 / (12.0 * h);
  if (m == 1) return (-3.0 * f(0) - 10.0 * f(1) + 18.0 * f(2) - 6.0 * f(3) + f(4)) * s;
  if (m + 2 == n)
    return (3.0 * f(n - 1) + 10.0 * f(n - 2) - 18.0 * f(n - 3) + 6.0 * f(n - 4) - f(n - 5)) * s;
  return (f(m - 2) - 8.0 * f(m - 1) + 8.0 * f(m + 1) - f(m + 2)) * s;
}

// Second derivative; one-sided 4-point stencil at the edges when n >= 4.
template <typename T, typename Get>
T second(Get&& f, std::size_t m, std::size_t n, double h) {
  const double s = 1.0 / (h * h);
  if (n < 4 || (m > 0 && m + 1 < n)) {
    const std::size_t c = m == 0 ? 1 : (m + 1 == n ? n - 2 : m);
    return (f(c + 1) - 2.0 * f(c) + f(c - 1)) * s;
  }
  if (m == 0) return (2.0 * f(0) - 5.0 * f(1) + 4.0 * f(2) - 1.0 * f(3)) * s;
  return (2.0 * f(n - 1) - 5.0 * f(n - 2) + 4.0 * f(n - 3) - 1.0 * f(n - 4)) * s;
}

}  // namespace fd

template <typename T>
GridField<T> diff_x(const GridField<T>& u, double hx) {
  GridField<T> out(u.nx(), u.ny());
  for (std::size_t k = 0; k < u.ny(); ++k)
    for (std::size_t j = 0; j < u.nx(); ++j)
      out(j, k) = fd::first<T>([&](std::size_t m) -> const T& { return u(m, k); }, j, u.nx(), hx);
  return out;
}

template <typename T>
GridField<T> diff_y(const GridField<T>& u, double hy) {
  GridField<T> out(u.nx(), u.ny());
  for (std::size_t k = 0; k < u.ny(); ++k)
    for (std::size_t j = 0; j < u.nx(); ++j)
      out(j, k) = fd::first<T>([&](std::size_t m) -> const T& { return u(j, m); }, k, u.ny(), hy);
  return out;
}

template <typename T>
GridField<T> diff_xx(const GridField<T>& u, double hx) {
  GridField<T> out(u.nx(), u.ny());
  for (std::size_t k = 0; k < u.ny(); ++k)
    for (std::size_t j = 0; j < u.nx(); ++j)
      out(j, k) = fd::second<T>([&](std::size_t m) -> const T& { return u(m, k); }, j, u.nx(), hx);
  return out;
}

template <typename T>
GridField<T> diff_yy(const GridField<T>& u, double hy) {
  GridField<T> out(u.nx(), u.ny());
  for (std::size_t k = 0; k < u.ny(); ++k)
    for (std::size_t j = 0; j < u.nx(); ++j)
      out(j, k) = fd::second<T>([&](std::size_t m) -> const T& { return u(j, m); }, k, u.ny(), hy);
  return out;
}

// Mixed derivative as diff_y(diff_x(u)); in the interior this is the
// standard 4-point cross stencil.
template <typename T>
GridField<T> diff_xy(const GridField<T>& u, double hx, double hy) {
  return diff_y(diff_x(u, hx), hy);
}

}  // namespace spinflat
