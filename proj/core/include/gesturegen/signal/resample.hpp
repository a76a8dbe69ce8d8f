#pragma once

#include <vector>

#include "gesturegen/common/matrix.hpp"

namespace gesturegen::sig {

// Rational-rate polyphase resampling: zero-stuff by `up`, low-pass with a
// Kaiser-windowed sinc at cutoff min(pi/up, pi/down), decimate by `down`.
// Each polyphase branch is normalized to unit sum, so the DC gain is exactly
// 1. The filter's group delay is compensated and the input is zero-padded
// beyond its ends; output length is ceil(n * up / down).
std::vector<double> resample_polyphase(const std::vector<double>& x,
                                       unsigned up, unsigned down,
                                       double kaiser_beta = 5.0,
                                       unsigned taps_per_phase = 0);

// Rate-based wrapper; up/down are reduced to lowest terms.
std::vector<double> resample_rate(const std::vector<double>& x, unsigned rate_in,
                                  unsigned rate_out);

// Applies resample_rate independently to every column.
MatrixRM resample_columns(const MatrixRM& x, unsigned rate_in,
                          unsigned rate_out);

}  // namespace gesturegen::sig
