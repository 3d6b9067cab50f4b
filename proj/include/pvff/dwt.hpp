#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pvff::dwt {

enum class WaveletName { haar, db2, db4 };

/// How the signal is extended past its ends before filtering.
///  - symmetric: half-sample reflection (x[-1] = x[0]). Bands are redundant:
///    a band of input length n has length ceil(n/2) + L/2 - 1.
///  - periodic: circular wrap. Requires an even length at every level, bands
///    have length n/2 and the transform is orthogonal (energy preserving).
enum class BoundaryMode { symmetric, periodic };

/// Orthonormal two-channel filter bank.
///
/// `lowpass` holds the scaling coefficients h[0..L-1] (sum sqrt(2), unit
/// norm) and `highpass[k] = (-1)^k * lowpass[L-1-k]`. Analysis is applied as
/// a correlation,
///
///   a[o] = sum_k h[k] * x[2o + 2 - L + k],   d[o] = sum_k g[k] * x[2o + 2 - L + k],
///
/// which reproduces the coefficient alignment of PyWavelets' `dwt`.
struct WaveletSpec {
  WaveletName name;
  std::vector<double> lowpass;
  std::vector<double> highpass;

  std::size_t filter_len() const noexcept { return lowpass.size(); }
};

const WaveletSpec& wavelet(WaveletName name);
WaveletName parse_wavelet_name(std::string_view text);
std::string_view to_string(WaveletName name);
BoundaryMode parse_boundary_mode(std::string_view text);
std::string_view to_string(BoundaryMode mode);

struct WaveletDecomposition {
  WaveletName wavelet = WaveletName::db4;
  BoundaryMode mode = BoundaryMode::symmetric;
  std::size_t levels = 0;
  std::vector<double> approx;                // level-J approximation
  std::vector<std::vector<double>> details;  // details[0] = level 1 (finest)
  std::size_t original_len = 0;
};

inline constexpr std::size_t kDefaultLevels = 5;
inline constexpr WaveletName kDefaultWavelet = WaveletName::db4;

/// Deepest decomposition with every band at least filter_len - 1 long:
/// floor(log2(n / (filter_len - 1))), or floor(log2 n) for Haar.
std::size_t max_levels(std::size_t n, std::size_t filter_len);

/// Like max_levels, additionally capped so every level sees an even length.
std::size_t max_levels(std::size_t n, std::size_t filter_len, BoundaryMode mode);

/// Output band length for one analysis step on an input of length n.
std::size_t band_length(std::size_t n, std::size_t filter_len, BoundaryMode mode);

WaveletDecomposition dwt_forward(std::span<const double> signal, const WaveletSpec& wavelet,
                                 std::size_t levels,
                                 BoundaryMode mode = BoundaryMode::symmetric);

std::vector<double> dwt_inverse(const WaveletDecomposition& decomp);

/// Band labels in feature order: a<J>, d<J>, ..., d1.
std::vector<std::string> band_names(std::size_t levels);

}  // namespace pvff::dwt
