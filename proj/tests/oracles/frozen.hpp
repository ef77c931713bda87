#pragma once

// Reference values computed by tests/oracles/freeze_values.py (mpmath at 40
// digits, scipy for distribution quantiles). Re-run it to regenerate.

namespace siqrng::frozen {

inline constexpr double kDelta = 0.0155607;

// Largest eigenvalue of the [-1, 1] sinc kernel (Gauss-Legendre Nystrom).
inline constexpr double kConcentration_0_01 = 0.006366126988868618;
inline constexpr double kConcentration_0_5 = 0.3096895657092712;
inline constexpr double kConcentration_1 = 0.5725817806378954;
inline constexpr double kConcentration_2 = 0.8805599223173115;
inline constexpr double kConcentration_5 = 0.9993524052266657;

inline constexpr double kOverlapDefault = 1.9268521667558773e-05;
inline constexpr double kOverlapDefaultBits = 15.663394585973705;
inline constexpr double kOverlapLeadingDefault = 1.9268521669520074e-05;
inline constexpr double kOverlap1445 = 1.6615975001215038e-05;
inline constexpr double kOverlap1445Bits = 15.877069523679062;

// Vacuum, delta = kDelta, m = 4096.
inline constexpr double kVacuumHMax = 8.33171184799175;
inline constexpr double kVacuumHMin = 7.33171184816796;
inline constexpr double kVacuumHLow = 7.33168273798196;

inline constexpr double kSqueezed5dBHLow = 8.16213329118948;
inline constexpr double kSqueezed3dBLoss33HLow = 7.62509997763705;

inline constexpr double kHMaxQuarterQuarterHalf = 1.54310660632722;
inline constexpr double kBayesUniformTwoBinsEmpty = 0.830074998557688;
inline constexpr double kBayesUniformFourZero = 0.708902692835609;
inline constexpr double kBayesPeakedThreeOneK2 = 0.976910426482084;

inline constexpr double kMonobitSixtyForty = 0.04550026389635844;
// 100-bit binary expansion of pi.
inline constexpr const char* kPiBits =
    "1100100100001111110110101010001000100001011010001100"
    "001000110100110001001100011001100010100010111000";
inline constexpr double kPiMonobit = 0.109598583399116;
inline constexpr double kPiBlockFrequencyM10 = 0.7064384496412808;
inline constexpr double kPiRuns = 0.5007979178870903;
inline constexpr double kPiCusumForward = 0.21919399348562665;

inline constexpr double kClopperPearsonLow = 0.9787239412463835;
inline constexpr double kClopperPearsonHigh = 0.9962732170757473;

inline constexpr double kErfOneOverSqrt2 = 0.6826894921370859;

}  // namespace siqrng::frozen
