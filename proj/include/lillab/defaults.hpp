#pragma once

// Versioned numeric defaults. Everything here is a declared, reproducible
// constant; runtime config may override the statistical thresholds.

namespace lillab::defaults {

inline constexpr int kDefaultsVersion = 1;

// --- scale function machinery ---
inline constexpr double kInversionRelTol = 1e-12;
inline constexpr int kInversionMaxIter = 200;
inline constexpr int kMonotoneGridSize = 257;
// Cached grid clipped to e^{+-64}; log-space evaluation works far beyond it.
inline constexpr double kGridLogLo = -64.0;
inline constexpr double kGridLogHi = 64.0;
inline constexpr int kLatticeSize = 64;        // scaling-certificate lattice

// --- quadrature ---
inline constexpr double kQuadRelTol = 1e-9;
inline constexpr double kQuadTruncation = 1e-16;  // of the running sum
inline constexpr int kQuadMaxDepth = 48;

// --- rho-search (Upsilon / vartheta) ---
inline constexpr int kRhoGridSize = 512;
inline constexpr double kGoldenRelTol = 1e-10;

// --- dichotomy verdicts ---
inline constexpr double kDivergenceFactor = 10.0;  // running max vs first decade
inline constexpr double kStabilizationTol = 1e-3;  // rel change over last decade
inline constexpr int kTracePointsPerDecade = 16;
inline constexpr double kHorizonZero = 1e-12;      // r decreases to this
inline constexpr double kHorizonInfinity = 1e12;   // r increases to this

// --- integral-test shells (geometric in u = log|log t|) ---
// u_max is capped where double rounding of gamma*log(t) (relative eps ~ 2e-16
// amplified by |log t| = e^u) stays negligible against the per-shell decrement.
inline constexpr double kShellUMin = 1.0;
inline constexpr double kShellUMax = 24.0;
inline constexpr double kShellRatioLog2 = 0.125;  // shell ratio = 2^0.125
inline constexpr int kShellFitCount = 10;         // shells in each fit window
inline constexpr double kShellRhoFinite = 0.98;
inline constexpr double kShellInfiniteFloor = 1e-3;

// --- rate sequences ---
inline constexpr double kRateDelta = 1.0;
inline constexpr int kRateNMax = 40;
inline constexpr double kUpsilonRatio = 1.25;     // upsilon_1/upsilon in psi-cap

// --- Monte Carlo ---
inline constexpr double kKsPValue = 0.01;
inline constexpr double kGridRatio = 2.0;          // geometric time grids
inline constexpr double kTruncationBudget = 1e-4;  // small-jump mean fraction
inline constexpr double kHeavyTailCapQuantile = 1e-9;  // cap at 1 - this
inline constexpr double kWilsonZ = 1.959963984540054;

}  // namespace lillab::defaults
