// Seeded synthetic review sentences with gold quadruples, one situation tag
// at a time.

#ifndef OTP_SYNTHETIC_HPP
#define OTP_SYNTHETIC_HPP

#include <cstdint>
#include <vector>

#include "otp/corpus.hpp"

namespace otp {

/// Categories the generator draws from.
const std::vector<std::string>& synthetic_categories();

/// One parseable record whose situation is `tag` (not Unparseable).
CorpusRecord synthetic_record(SituationTag tag, std::uint64_t seed);

/// `count` records cycling basic, one_to_many, mono_implicit, bi_implicit,
/// cross_mapping.
std::vector<CorpusRecord> synthetic_corpus(std::size_t count, std::uint64_t seed);

}  // namespace otp

#endif  // OTP_SYNTHETIC_HPP
