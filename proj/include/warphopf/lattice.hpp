#ifndef WARPHOPF_LATTICE_HPP
#define WARPHOPF_LATTICE_HPP

#include "warphopf/parallel.hpp"
#include "warphopf/types.hpp"

#include <stdexcept>
#include <utility>
#include <vector>

namespace warphopf
{
/// Square n x n lattice of chart parameters z = center + spacing * ((i - c) + I (j - c)),
/// c = (n - 1)/2; i runs along u = Re z, j along v = Im z.
struct LatticeGeometry
{
    cplx   center  = 0.0;
    double spacing = 1.0;
    int    n       = 0;

    [[nodiscard]] cplx node(int i, int j) const
    {
        const double c = 0.5 * (n - 1);
        return center + spacing * cplx(i - c, j - c);
    }
    [[nodiscard]] std::size_t size() const { return static_cast< std::size_t >(n) * static_cast< std::size_t >(n); }
    [[nodiscard]] std::size_t index(int i, int j) const
    {
        return static_cast< std::size_t >(j) * static_cast< std::size_t >(n) + static_cast< std::size_t >(i);
    }
};

template < typename T >
T zero_value()
{
    if constexpr (std::is_arithmetic_v< T > || std::is_same_v< T, cplx >)
        return T(0);
    else
        return T::Zero();
}

/// Field sampled on a lattice. Nodes within `band` of the lattice edge carry no valid data
/// (their stencils would leave the lattice).
template < typename T >
class Lattice
{
public:
    Lattice() = default;
    explicit Lattice(LatticeGeometry geom, int band = 0) : geom_(geom), band_(band), values_(geom.size(), zero_value< T >()) {}

    [[nodiscard]] const LatticeGeometry& geometry() const { return geom_; }
    [[nodiscard]] int                    band() const { return band_; }
    [[nodiscard]] int                    n() const { return geom_.n; }

    [[nodiscard]] bool valid(int i, int j) const
    {
        return i >= band_ && j >= band_ && i < geom_.n - band_ && j < geom_.n - band_;
    }

    T&       operator()(int i, int j) { return values_[geom_.index(i, j)]; }
    const T& operator()(int i, int j) const { return values_[geom_.index(i, j)]; }

    [[nodiscard]] std::vector< T >&       values() { return values_; }
    [[nodiscard]] const std::vector< T >& values() const { return values_; }

private:
    LatticeGeometry  geom_;
    int              band_ = 0;
    std::vector< T > values_;
};

/// Node-local map over all valid nodes (data-parallel); the result inherits the band.
template < typename T, typename Fn >
auto map_nodes(const Lattice< T >& in, Fn&& fn)
{
    using R = std::decay_t< decltype(fn(in(0, 0), 0, 0)) >;
    Lattice< R > out(in.geometry(), in.band());
    const int    n = in.n();
    parallel_for(static_cast< std::size_t >(n), [&](std::size_t jb, std::size_t je) {
        for (auto j = static_cast< int >(jb); j < static_cast< int >(je); ++j)
            for (int i = 0; i < n; ++i)
                if (in.valid(i, j))
                    out(i, j) = fn(in(i, j), i, j);
    });
    return out;
}

namespace detail
{
// Fourth-order central first derivative along one lattice axis.
template < typename T >
Lattice< T > axis_derivative(const Lattice< T >& f, bool along_u)
{
    const int    n    = f.n();
    const int    band = f.band() + 2;
    const double inv  = 1.0 / (12.0 * f.geometry().spacing);
    if (n <= 2 * band)
        throw std::invalid_argument("lattice too small for the derivative stencil");
    Lattice< T > out(f.geometry(), band);
    parallel_for(static_cast< std::size_t >(n), [&](std::size_t jb, std::size_t je) {
        for (auto j = static_cast< int >(jb); j < static_cast< int >(je); ++j)
        {
            if (j < band || j >= n - band)
                continue;
            for (int i = band; i < n - band; ++i)
            {
                if (along_u)
                    out(i, j) = (f(i - 2, j) - 8.0 * f(i - 1, j) + 8.0 * f(i + 1, j) - f(i + 2, j)) * inv;
                else
                    out(i, j) = (f(i, j - 2) - 8.0 * f(i, j - 1) + 8.0 * f(i, j + 1) - f(i, j + 2)) * inv;
            }
        }
    });
    return out;
}
} // namespace detail

template < typename T >
Lattice< T > derivative_u(const Lattice< T >& f)
{
    return detail::axis_derivative(f, true);
}

template < typename T >
Lattice< T > derivative_v(const Lattice< T >& f)
{
    return detail::axis_derivative(f, false);
}

/// Wirtinger derivatives d/dz = (d/du - i d/dv)/2 and d/dzbar = (d/du + i d/dv)/2 from
/// fourth-order central differences; the valid band grows by 2.
template < typename T >
std::pair< Lattice< complexified_t< T > >, Lattice< complexified_t< T > > > complex_derivative(const Lattice< T >& f)
{
    using C              = complexified_t< T >;
    const auto du        = derivative_u(f);
    const auto dv        = derivative_v(f);
    const int  n         = f.n();
    const int  band      = du.band();
    const cplx half_i    = cplx(0.0, 0.5);
    Lattice< C > dz(f.geometry(), band);
    Lattice< C > dzb(f.geometry(), band);
    parallel_for(static_cast< std::size_t >(n), [&](std::size_t jb, std::size_t je) {
        for (auto j = static_cast< int >(jb); j < static_cast< int >(je); ++j)
            for (int i = 0; i < n; ++i)
            {
                if (!du.valid(i, j))
                    continue;
                C a;
                C b;
                if constexpr (std::is_same_v< T, C >)
                {
                    a = du(i, j);
                    b = dv(i, j);
                }
                else if constexpr (std::is_same_v< T, double >)
                {
                    a = C(du(i, j));
                    b = C(dv(i, j));
                }
                else
                {
                    a = du(i, j).template cast< cplx >();
                    b = dv(i, j).template cast< cplx >();
                }
                dz(i, j)  = 0.5 * a - half_i * b;
                dzb(i, j) = 0.5 * a + half_i * b;
            }
    });
    return {std::move(dz), std::move(dzb)};
}
} // namespace warphopf

#endif // WARPHOPF_LATTICE_HPP
