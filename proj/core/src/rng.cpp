#include "roughvol/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace roughvol {

namespace philox4x64 {
namespace {

constexpr std::uint64_t kMul0 = 0xD2E7470EE14C6C93ULL;
constexpr std::uint64_t kMul1 = 0xCA5A826395121157ULL;
constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;

inline void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi, std::uint64_t& lo) {
    const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
    hi = static_cast<std::uint64_t>(p >> 64);
    lo = static_cast<std::uint64_t>(p);
}

inline Block round(const Block& x, const Key& k) {
    std::uint64_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, x[0], hi0, lo0);
    mulhilo(kMul1, x[2], hi1, lo1);
    return {hi1 ^ x[1] ^ k[0], lo1, hi0 ^ x[3] ^ k[1], lo0};
}

}  // namespace

Block generate(const Counter& counter, const Key& key) {
    Block x = counter;
    Key k = key;
    x = round(x, k);
    for (int r = 1; r < 10; ++r) {
        k[0] += kWeyl0;
        k[1] += kWeyl1;
        x = round(x, k);
    }
    return x;
}

}  // namespace philox4x64

double normal_pdf(double x) {
    static const double inv_sqrt_2pi = 0.3989422804014326779399461;
    return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

double normal_cdf(double x) {
    static const double inv_sqrt2 = 0.7071067811865475244008444;
    return 0.5 * std::erfc(-x * inv_sqrt2);
}

namespace {

// AS241 PPND16 coefficient blocks: central rational in r = 0.180625 - q^2,
// then two tail regimes in r = sqrt(-log(min(p, 1-p))).
constexpr double a[8] = {3.3871328727963666080e0,  1.3314166789178437745e2,
                         1.9715909503065514427e3,  1.3731693765509461125e4,
                         4.5921953931549871457e4,  6.7265770927008700853e4,
                         3.3430575583588128105e4,  2.5090809287301226727e3};
constexpr double b[8] = {1.0,                      4.2313330701600911252e1,
                         6.8718700749205790830e2,  5.3941960214247511077e3,
                         2.1213794301586595867e4,  3.9307895800092710610e4,
                         2.8729085735721942674e4,  5.2264952788528545610e3};
constexpr double c[8] = {1.42343711074968357734e0, 4.63033784615654529590e0,
                         5.76949722146069140550e0, 3.64784832476320460504e0,
                         1.27045825245236838258e0, 2.41780725177450611770e-1,
                         2.27238449892691845833e-2, 7.74545014278341407640e-4};
constexpr double d[8] = {1.0,                      2.05319162663775882187e0,
                         1.67638483018380384940e0, 6.89767334985100004550e-1,
                         1.48103976427480074590e-1, 1.51986665636164571966e-2,
                         5.47593808499534494600e-4, 1.05075007164441684324e-9};
constexpr double e[8] = {6.65790464350110377720e0, 5.46378491116411436990e0,
                         1.78482653991729133580e0, 2.96560571828504891230e-1,
                         2.65321895265761230930e-2, 1.24266094738807843860e-3,
                         2.71155556874348757815e-5, 2.01033439929228813265e-7};
constexpr double f[8] = {1.0,                      5.99832206555887937690e-1,
                         1.36929880922735805310e-1, 1.48753612908506148525e-2,
                         7.86869131145613259100e-4, 1.84631831751005468180e-5,
                         1.42151175831644588870e-7, 2.04426310338993978564e-15};

inline double rational(const double (&num)[8], const double (&den)[8], double r) {
    double n = num[7], m = den[7];
    for (int i = 6; i >= 0; --i) {
        n = n * r + num[i];
        m = m * r + den[i];
    }
    return n / m;
}

}  // namespace

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("normal_quantile: p outside (0, 1)");
    const double q = p - 0.5;
    if (std::abs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q * rational(a, b, r);
    }
    double r = q < 0.0 ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double x;
    if (r <= 5.0) {
        x = rational(c, d, r - 1.6);
    } else {
        x = rational(e, f, r - 5.0);
    }
    return q < 0.0 ? -x : x;
}

void NormalStream::fill(std::span<double> out) {
    static const double scale = 0x1.0p-53;
    static const double offset = 0x1.0p-54;
    for (double& v : out) {
        if (buffered_ == 0) {
            buffer_ = philox4x64::generate({batch_, next_block_++, 0, 0}, key_);
            buffered_ = 4;
        }
        const std::uint64_t w = buffer_[4 - buffered_];
        --buffered_;
        const double u = static_cast<double>(w >> 11) * scale + offset;
        v = normal_quantile(u);
    }
}

double NormalStream::next() {
    double v;
    fill(std::span<double>(&v, 1));
    return v;
}

}  // namespace roughvol
