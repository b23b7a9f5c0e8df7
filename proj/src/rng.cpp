#include "catwalk/rng.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

#include <boost/random/binomial_distribution.hpp>
#include <boost/random/poisson_distribution.hpp>

#include "catwalk/errors.hpp"

namespace catwalk
{
std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view label)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : label)
    {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return mix64(mix64(master_seed) ^ h);
}

std::uint64_t resolve_master_seed(std::uint64_t const* explicit_seed)
{
    if (explicit_seed)
    {
        return *explicit_seed;
    }
    if (char const* env = std::getenv(kSeedEnvVar); env && *env)
    {
        try
        {
            return std::stoull(env, nullptr, 0);
        }
        catch (std::exception const&)
        {
            throw ParameterError(std::string(kSeedEnvVar)
                                 + " is not an unsigned integer: " + env);
        }
    }
    return kDefaultMasterSeed;
}

namespace philox
{
namespace
{
constexpr std::uint64_t kM0 = 0xD2E7470EE14C6C93ULL;
constexpr std::uint64_t kM1 = 0xCA5A826395121157ULL;
constexpr std::uint64_t kW0 = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kW1 = 0xBB67AE8584CAA73BULL;

inline void mulhilo(std::uint64_t a,
                    std::uint64_t b,
                    std::uint64_t& hi,
                    std::uint64_t& lo)
{
    __extension__ using u128 = unsigned __int128;
    u128 const product = static_cast<u128>(a) * b;
    hi = static_cast<std::uint64_t>(product >> 64);
    lo = static_cast<std::uint64_t>(product);
}
}  // namespace

Counter philox4x64_10(Counter ctr, Key key)
{
    for (int round = 0; round < 10; ++round)
    {
        if (round > 0)
        {
            key[0] += kW0;
            key[1] += kW1;
        }
        std::uint64_t hi0, lo0, hi1, lo1;
        mulhilo(kM0, ctr[0], hi0, lo0);
        mulhilo(kM1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
}
}  // namespace philox

Stream::Stream(SeedSpec seed) : seed_(seed) {}

void Stream::refill()
{
    buffer_ = philox::philox4x64_10({block_, 0, seed_.stream_index, 0},
                                    {seed_.master_seed, 0});
    ++block_;
    pos_ = 0;
}

int draw_bernoulli(Stream& stream, double q)
{
    require(q >= 0.0 && q <= 1.0, "bernoulli: probability outside [0,1]");
    return stream.uniform01() < q ? 1 : 0;
}

std::int64_t draw_binomial(Stream& stream, std::int64_t n, double q)
{
    require(n >= 0, "binomial: negative trial count");
    require(q >= 0.0 && q <= 1.0, "binomial: probability outside [0,1]");
    if (n == 0 || q == 0.0)
    {
        return 0;
    }
    if (q == 1.0)
    {
        return n;
    }
    // BTRD for n*min(q,1-q) >= 11, inversion below; both exact.
    boost::random::binomial_distribution<std::int64_t, double> dist(n, q);
    return dist(stream);
}

std::int64_t draw_poisson(Stream& stream, double mean)
{
    require(std::isfinite(mean) && mean >= 0.0,
            "poisson: mean must be finite and non-negative");
    if (mean == 0.0)
    {
        return 0;
    }
    boost::random::poisson_distribution<std::int64_t, double> dist(mean);
    return dist(stream);
}

std::int64_t draw_geometric(Stream& stream, double s)
{
    require(s > 0.0 && s <= 1.0, "geometric: success probability outside (0,1]");
    if (s == 1.0)
    {
        return 1;
    }
    // P(G > k) = P(U <= (1-s)^k) for U uniform on (0,1].
    double const failures
        = std::floor(std::log(stream.uniform_open_zero()) / std::log1p(-s));
    constexpr double kCap = 9.0e18;
    return static_cast<std::int64_t>(failures < kCap ? failures : kCap) + 1;
}

double draw_exponential(Stream& stream, double rate)
{
    require(rate > 0.0 && std::isfinite(rate),
            "exponential: rate must be positive");
    return -std::log(stream.uniform_open_zero()) / rate;
}
}  // namespace catwalk
