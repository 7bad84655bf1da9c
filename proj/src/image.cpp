#include "emp/image.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "emp/errors.hpp"

namespace emp::image {
namespace {

constexpr double kDynamicRange = 255.0;
constexpr double kSsimK1 = 0.01;
constexpr double kSsimK2 = 0.03;
constexpr double kSsimSigma = 1.5;
constexpr int kSsimRadius = 5;

// scipy.ndimage "reflect": d c b a | a b c d | d c b a
std::size_t reflect_index(long i, long n) {
    const long period = 2 * n;
    long m = i % period;
    if (m < 0) m += period;
    if (m >= n) m = period - 1 - m;
    return static_cast<std::size_t>(m);
}

std::array<double, 2 * kSsimRadius + 1> gaussian_taps() {
    std::array<double, 2 * kSsimRadius + 1> taps{};
    double total = 0.0;
    for (int k = -kSsimRadius; k <= kSsimRadius; ++k) {
        const double v = std::exp(-0.5 * (k * k) / (kSsimSigma * kSsimSigma));
        taps[static_cast<std::size_t>(k + kSsimRadius)] = v;
        total += v;
    }
    for (double& t : taps) t /= total;
    return taps;
}

std::vector<double> gaussian_blur(const std::vector<double>& src, std::size_t width, std::size_t height) {
    static const auto taps = gaussian_taps();
    const long w = static_cast<long>(width);
    const long h = static_cast<long>(height);
    std::vector<double> rows(src.size());
    for (long y = 0; y < h; ++y) {
        for (long x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int k = -kSsimRadius; k <= kSsimRadius; ++k) {
                acc += taps[static_cast<std::size_t>(k + kSsimRadius)] *
                       src[static_cast<std::size_t>(y) * width + reflect_index(x + k, w)];
            }
            rows[static_cast<std::size_t>(y) * width + static_cast<std::size_t>(x)] = acc;
        }
    }
    std::vector<double> out(src.size());
    for (long y = 0; y < h; ++y) {
        for (long x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int k = -kSsimRadius; k <= kSsimRadius; ++k) {
                acc += taps[static_cast<std::size_t>(k + kSsimRadius)] *
                       rows[reflect_index(y + k, h) * width + static_cast<std::size_t>(x)];
            }
            out[static_cast<std::size_t>(y) * width + static_cast<std::size_t>(x)] = acc;
        }
    }
    return out;
}

std::uint8_t to_byte(double v) {
    return static_cast<std::uint8_t>(std::clamp(std::round(v), 0.0, 255.0));
}

// centers(c) gives the value each pixel of channel c is measured against; decide(scores)
// returns the keep mask for the centered channel.
template <class CenterFn, class DecideFn>
PruneOutcome prune_channels(const ImageTensor& img, CenterFn&& centers, DecideFn&& decide) {
    img.validate();
    PruneOutcome out;
    out.pruned = img;
    std::size_t dropped_total = 0;
    for (std::size_t c = 0; c < kChannels; ++c) {
        ChannelReport& report = out.channels[c];
        report.mean = channel_mean(img, c);
        const std::vector<double> center = centers(c);
        const auto& src = img.planes[c];
        std::vector<double> centered(src.size());
        for (std::size_t i = 0; i < src.size(); ++i) centered[i] = src[i] - center[i];
        const ScoreVector scores(std::move(centered));
        std::vector<bool>& mask = out.masks[c];
        if (scores.all_zero()) {
            report.passthrough = true;
            mask.assign(scores.size(), true);
        } else {
            mask = decide(scores);
        }
        auto& plane = out.pruned.planes[c];
        for (std::size_t i = 0; i < plane.size(); ++i) {
            // Kept pixels are copied, not rebuilt from score + center, so they stay byte-exact.
            plane[i] = mask[i] ? src[i] : to_byte(center[i]);
        }
        report.kept = static_cast<std::size_t>(std::count(mask.begin(), mask.end(), true));
        dropped_total += mask.size() - report.kept;
        report.sparsity = 1.0 - static_cast<double>(report.kept) / static_cast<double>(mask.size());
        report.ssim = ssim_plane(src, plane, img.width, img.height);
        report.psnr_db = psnr_plane(src, plane);
    }
    out.sparsity = static_cast<double>(dropped_total) / static_cast<double>(kChannels * img.pixel_count());
    out.ssim = ssim(img, out.pruned);
    out.psnr_db = psnr(img, out.pruned);
    return out;
}

}  // namespace

ImageTensor ImageTensor::filled(std::size_t width, std::size_t height, std::uint8_t r, std::uint8_t g,
                                std::uint8_t b) {
    ImageTensor img;
    img.width = width;
    img.height = height;
    img.planes[0].assign(width * height, r);
    img.planes[1].assign(width * height, g);
    img.planes[2].assign(width * height, b);
    return img;
}

void ImageTensor::validate() const {
    if (width == 0 || height == 0) throw DimensionMismatch("image must be at least 1x1");
    for (const auto& p : planes) {
        if (p.size() != width * height) throw DimensionMismatch("channel plane size differs from width * height");
    }
}

bool operator==(const ImageTensor& a, const ImageTensor& b) {
    return a.width == b.width && a.height == b.height && a.planes == b.planes;
}

double channel_mean(const ImageTensor& img, std::size_t c) {
    const auto& plane = img.planes.at(c);
    const double total = std::accumulate(plane.begin(), plane.end(), 0.0);
    return total / static_cast<double>(plane.size());
}

ScoreVector channel_scores(const ImageTensor& img, std::size_t c) {
    img.validate();
    const double mean = channel_mean(img, c);
    const auto& plane = img.planes[c];
    std::vector<double> scores(plane.size());
    std::transform(plane.begin(), plane.end(), scores.begin(), [mean](std::uint8_t v) { return v - mean; });
    return ScoreVector(std::move(scores));
}

Partition tile_partition(std::size_t width, std::size_t height, std::size_t patch) {
    if (patch < 1) throw DomainError("patch edge must be >= 1");
    std::vector<std::vector<std::size_t>> groups;
    for (std::size_t ty = 0; ty < height; ty += patch) {
        for (std::size_t tx = 0; tx < width; tx += patch) {
            std::vector<std::size_t> tile;
            for (std::size_t y = ty; y < std::min(height, ty + patch); ++y) {
                for (std::size_t x = tx; x < std::min(width, tx + patch); ++x) tile.push_back(y * width + x);
            }
            groups.push_back(std::move(tile));
        }
    }
    return Partition(std::move(groups));
}

const char* to_string(Centering c) noexcept { return c == Centering::tile ? "tile" : "channel"; }

Centering parse_centering(const std::string& s) {
    if (s == "tile") return Centering::tile;
    if (s == "channel") return Centering::channel;
    throw ParseError("unknown centering '" + s + "' (expected tile or channel)");
}

PruneOutcome prune_image_global(const ImageTensor& img, double beta) {
    if (!(beta > 0.0)) throw NonPositiveBeta("beta must be positive");
    return prune_channels(
        img, [&](std::size_t c) { return std::vector<double>(img.pixel_count(), channel_mean(img, c)); },
        [beta](const ScoreVector& scores) { return emp_decide(scores, beta).mask; });
}

PruneOutcome prune_image_patch(const ImageTensor& img, double beta, std::size_t patch, Centering centering) {
    if (!(beta > 0.0)) throw NonPositiveBeta("beta must be positive");
    img.validate();
    const Partition tiles = tile_partition(img.width, img.height, patch);
    auto centers = [&](std::size_t c) {
        if (centering == Centering::channel) return std::vector<double>(img.pixel_count(), channel_mean(img, c));
        std::vector<double> out(img.pixel_count());
        for (const auto& tile : tiles.groups()) {
            double total = 0.0;
            for (std::size_t i : tile) total += img.planes[c][i];
            const double mean = total / static_cast<double>(tile.size());
            for (std::size_t i : tile) out[i] = mean;
        }
        return out;
    };
    return prune_channels(img, centers, [&](const ScoreVector& scores) {
        return emp_decide_partitioned(scores, tiles, beta, ZeroGroupPolicy::keep_all).mask;
    });
}

double ssim_plane(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b, std::size_t width,
                  std::size_t height) {
    if (a.size() != b.size() || a.size() != width * height) throw DimensionMismatch("SSIM planes differ in size");
    const std::size_t n = a.size();
    std::vector<double> x(n), y(n), xx(n), yy(n), xy(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = a[i];
        y[i] = b[i];
        xx[i] = x[i] * x[i];
        yy[i] = y[i] * y[i];
        xy[i] = x[i] * y[i];
    }
    const auto mx = gaussian_blur(x, width, height);
    const auto my = gaussian_blur(y, width, height);
    const auto mxx = gaussian_blur(xx, width, height);
    const auto myy = gaussian_blur(yy, width, height);
    const auto mxy = gaussian_blur(xy, width, height);

    const double c1 = (kSsimK1 * kDynamicRange) * (kSsimK1 * kDynamicRange);
    const double c2 = (kSsimK2 * kDynamicRange) * (kSsimK2 * kDynamicRange);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double vx = mxx[i] - mx[i] * mx[i];
        const double vy = myy[i] - my[i] * my[i];
        const double cov = mxy[i] - mx[i] * my[i];
        total += ((2.0 * mx[i] * my[i] + c1) * (2.0 * cov + c2)) /
                 ((mx[i] * mx[i] + my[i] * my[i] + c1) * (vx + vy + c2));
    }
    return total / static_cast<double>(n);
}

double ssim(const ImageTensor& a, const ImageTensor& b) {
    a.validate();
    b.validate();
    if (a.width != b.width || a.height != b.height) throw DimensionMismatch("SSIM images differ in size");
    double total = 0.0;
    for (std::size_t c = 0; c < kChannels; ++c) total += ssim_plane(a.planes[c], b.planes[c], a.width, a.height);
    return total / static_cast<double>(kChannels);
}

namespace {

double psnr_from_sse(double sse, std::size_t count) {
    if (sse == 0.0) return std::numeric_limits<double>::infinity();
    const double mse = sse / static_cast<double>(count);
    return 10.0 * std::log10(kDynamicRange * kDynamicRange / mse);
}

double squared_error(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
    double sse = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
        sse += d * d;
    }
    return sse;
}

}  // namespace

double psnr_plane(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
    if (a.size() != b.size() || a.empty()) throw DimensionMismatch("PSNR planes differ in size");
    return psnr_from_sse(squared_error(a, b), a.size());
}

double psnr(const ImageTensor& a, const ImageTensor& b) {
    a.validate();
    b.validate();
    if (a.width != b.width || a.height != b.height) throw DimensionMismatch("PSNR images differ in size");
    double sse = 0.0;
    for (std::size_t c = 0; c < kChannels; ++c) sse += squared_error(a.planes[c], b.planes[c]);
    return psnr_from_sse(sse, kChannels * a.pixel_count());
}

}  // namespace emp::image
