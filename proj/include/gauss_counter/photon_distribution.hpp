#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "gauss_counter/precision.hpp"

namespace gauss_counter {

/// Total photon-number probabilities p_0..p_N of an S-mode state.
/// `sample_count` is set when the values are empirical frequencies.
template <typename T>
struct PhotonDistribution {
    int mode_count = 0;
    std::vector<T> probabilities;
    std::optional<std::uint64_t> sample_count;

    int max_photons() const noexcept { return static_cast<int>(probabilities.size()) - 1; }

    template <typename U>
    PhotonDistribution<U> cast() const
    {
        return {mode_count, cast_vector<U>(probabilities), sample_count};
    }
};

}  // namespace gauss_counter
