#include "movepoly/sampling.hpp"

namespace movepoly {

std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

BallSampler BallSampler::stream(std::uint64_t seed, std::string_view tag) {
    // FNV-1a over the tag.
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : tag) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return BallSampler(mix_seed(seed ^ mix_seed(h)));
}

Vector BallSampler::unit_ball(Eigen::Index dim) {
    Vector v(dim);
    while (true) {
        for (Eigen::Index i = 0; i < dim; ++i) v(i) = 2.0 * uniform() - 1.0;
        if (v.squaredNorm() <= 1.0) return v;
    }
}

}  // namespace movepoly
