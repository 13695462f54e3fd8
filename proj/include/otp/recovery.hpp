// Quadruple recovery from pruned trees.

#ifndef OTP_RECOVERY_HPP
#define OTP_RECOVERY_HPP

#include <vector>

#include "otp/tree.hpp"

namespace otp {

/// Quadruples read off a pruned tree, in raw (un-augmented) coordinates and
/// sorted. Within each Q, aspect and opinion nodes pair as a cross product,
/// except that a single node carrying a two-value chain spreads its values
/// over the other side, nearest node first, chain bottom first.
/// Throws MalformedTree for structures the pruned grammar does not license
/// and for fake-token leaves outside [0,1) / [1,2).
std::vector<SentimentQuadruple> recover_quads(const OpinionTree& tree, bool augmented);

}  // namespace otp

#endif  // OTP_RECOVERY_HPP
