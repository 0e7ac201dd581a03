#ifndef WARPHOPF_TYPES_HPP
#define WARPHOPF_TYPES_HPP

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <limits>

namespace warphopf
{
using cplx = std::complex< double >;

template < typename Scalar >
using Vector3 = Eigen::Matrix< Scalar, 3, 1 >;

using Vec3  = Vector3< double >;
using Vec3c = Vector3< cplx >;
using Mat3  = Eigen::Matrix3d;

/// Closed interval [lo, hi]; hi may be +inf.
struct Interval
{
    double lo = 0.0;
    double hi = std::numeric_limits< double >::infinity();

    [[nodiscard]] bool contains(double x) const { return x >= lo && x <= hi; }
    [[nodiscard]] bool bounded() const { return std::isfinite(lo) && std::isfinite(hi); }
};

/// Maps a scalar type to its complexification (double -> cplx, Vec3 -> Vec3c).
template < typename T >
struct Complexified
{
    using type = T;
};
template <>
struct Complexified< double >
{
    using type = cplx;
};
template <>
struct Complexified< Vec3 >
{
    using type = Vec3c;
};
template < typename T >
using complexified_t = typename Complexified< T >::type;

inline double real_part(double x)
{
    return x;
}
inline double real_part(const cplx& x)
{
    return x.real();
}
} // namespace warphopf

#endif // WARPHOPF_TYPES_HPP
