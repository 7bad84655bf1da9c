#pragma once

// Featurewise pruning of RGB images: each channel is mean-centered, the effective-number
// rule picks which pixels keep their deviation, and dropped pixels fall back to the
// mean they were centered on.

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "emp/core.hpp"

namespace emp::image {

inline constexpr std::size_t kChannels = 3;

/// 8-bit RGB image stored as three row-major planes.
struct ImageTensor {
    std::size_t width = 0;
    std::size_t height = 0;
    std::array<std::vector<std::uint8_t>, kChannels> planes;

    static ImageTensor filled(std::size_t width, std::size_t height, std::uint8_t r, std::uint8_t g, std::uint8_t b);

    std::size_t pixel_count() const noexcept { return width * height; }
    std::uint8_t& at(std::size_t c, std::size_t x, std::size_t y) { return planes[c][y * width + x]; }
    std::uint8_t at(std::size_t c, std::size_t x, std::size_t y) const { return planes[c][y * width + x]; }

    /// Throws DimensionMismatch if sizes are zero or planes disagree with width * height.
    void validate() const;
};

bool operator==(const ImageTensor& a, const ImageTensor& b);

struct ChannelReport {
    double mean = 0.0;
    bool passthrough = false;  // constant channel, left unpruned
    std::size_t kept = 0;
    double sparsity = 0.0;
    double ssim = 1.0;
    double psnr_db = std::numeric_limits<double>::infinity();
};

struct PruneOutcome {
    ImageTensor pruned;
    std::array<std::vector<bool>, kChannels> masks;
    std::array<ChannelReport, kChannels> channels;
    double sparsity = 0.0;  // dropped pixel-channels / (3 * width * height)
    double ssim = 1.0;      // mean over channels
    double psnr_db = std::numeric_limits<double>::infinity();
};

double channel_mean(const ImageTensor& img, std::size_t c);

/// X_c - mean(X_c), flattened row-major. All zero for a constant channel.
ScoreVector channel_scores(const ImageTensor& img, std::size_t c);

/// Non-overlapping patch x patch tiles in row-major tile order; edge tiles may be smaller.
Partition tile_partition(std::size_t width, std::size_t height, std::size_t patch);

PruneOutcome prune_image_global(const ImageTensor& img, double beta = 1.0);

/// What a patch-mode score is measured against, and what a dropped pixel falls back to.
enum class Centering { tile, channel };

const char* to_string(Centering c) noexcept;
Centering parse_centering(const std::string& s);

/// Tiles are pruned independently. With Centering::tile each tile is centered on its own
/// mean; Centering::channel uses the whole-channel mean as global mode does.
PruneOutcome prune_image_patch(const ImageTensor& img, double beta = 1.0, std::size_t patch = 4,
                               Centering centering = Centering::tile);

/// Gaussian-window SSIM of one plane: 11x11 window, sigma 1.5, K1 = 0.01, K2 = 0.03,
/// L = 255, population statistics, mirrored ("reflect") borders, averaged over every pixel.
double ssim_plane(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b, std::size_t width,
                  std::size_t height);

/// Mean of the per-channel SSIM values.
double ssim(const ImageTensor& a, const ImageTensor& b);

/// 10 log10(255^2 / MSE) over all pixel-channels; +infinity when the images are identical.
double psnr(const ImageTensor& a, const ImageTensor& b);
double psnr_plane(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);

}  // namespace emp::image
