#include "otp/synthetic.hpp"

#include <algorithm>
#include <map>
#include <random>

namespace otp {

namespace {

const std::string kAmbience = "AMBIENCE#GENERAL";
const std::string kFood = "FOOD#QUALITY";
const std::string kLaptop = "LAPTOP#GENERAL";
const std::string kPrice = "LAPTOP#PRICE";
const std::string kRestaurant = "RESTAURANT#GENERAL";
const std::string kService = "SERVICE#GENERAL";

struct Aspect {
  std::vector<std::string> words;
  std::string category;
};

struct Opinion {
  std::string word;
  Polarity polarity;
  std::string category;  // facet opinions only
};

const std::vector<Aspect> kAspects = {
    {{"music"}, kAmbience},       {{"decor"}, kAmbience},     {{"pizza"}, kFood},
    {{"pasta"}, kFood},           {{"sushi", "roll"}, kFood}, {{"wine"}, kFood},
    {{"laptop"}, kLaptop},        {{"screen"}, kLaptop},      {{"keyboard"}, kLaptop},
    {{"battery", "life"}, kLaptop}, {{"price"}, kPrice},      {{"cost"}, kPrice},
    {{"place"}, kRestaurant},     {{"restaurant"}, kRestaurant}, {{"staff"}, kService},
    {{"waiter"}, kService},       {{"service"}, kService},    {{"customer", "support"}, kService}};

const std::vector<Opinion> kOpinions = {
    {"great", Polarity::Positive, ""},    {"tasty", Polarity::Positive, ""},  {"friendly", Polarity::Positive, ""},
    {"solid", Polarity::Positive, ""},    {"terrible", Polarity::Negative, ""}, {"rude", Polarity::Negative, ""},
    {"slow", Polarity::Negative, ""},     {"bland", Polarity::Negative, ""},  {"awful", Polarity::Negative, ""},
    {"fine", Polarity::Neutral, ""},      {"okay", Polarity::Neutral, ""},    {"average", Polarity::Neutral, ""}};

// Opinions that name their own category.
const std::vector<Opinion> kFacetOpinions = {
    {"cozy", Polarity::Positive, kAmbience},      {"noisy", Polarity::Negative, kAmbience},
    {"delicious", Polarity::Positive, kFood},     {"inedible", Polarity::Negative, kFood},
    {"powerful", Polarity::Positive, kLaptop},    {"sluggish", Polarity::Negative, kLaptop},
    {"affordable", Polarity::Positive, kPrice},   {"overpriced", Polarity::Negative, kPrice},
    {"lovely", Polarity::Positive, kRestaurant},  {"forgettable", Polarity::Neutral, kRestaurant},
    {"attentive", Polarity::Positive, kService},  {"unhelpful", Polarity::Negative, kService}};

// Words whose polarity depends on the aspect: positive with the first
// category, negative with the second.
struct ContextOpinion {
  std::string word;
  std::string positive_with, negative_with;
};
const std::vector<ContextOpinion> kContextOpinions = {{"cheap", kPrice, kLaptop}, {"hot", kFood, kLaptop}};

// Aspects with a second category reachable through a facet opinion.
struct MultiFacet {
  std::string word, facet;
};
const std::vector<MultiFacet> kMultiFacet = {{"laptop", kPrice}, {"place", kAmbience}};

const std::vector<std::string> kImplicitOpinionCue = {"recommend", "avoid", "tried"};  // by polarity
const std::vector<std::string> kSentenceCue = {"worth", "regret", "meh"};             // by polarity
const std::map<std::string, std::string> kCategoryCue = {{kAmbience, "vibes"},   {kFood, "flavors"},
                                                         {kLaptop, "machine"},   {kPrice, "money"},
                                                         {kRestaurant, "visit"}, {kService, "hospitality"}};

const std::vector<std::string> kFiller = {"the", "was", "and", "but", "a", "really", "it", "so", "I", "think", ",", "too"};

std::size_t polarity_index(Polarity p) {
  for (std::size_t i = 0; i < kPolarities.size(); ++i) {
    if (kPolarities[i] == p) return i;
  }
  return 0;
}

class Builder {
 public:
  explicit Builder(std::mt19937_64& rng) : rng_(rng) {}

  std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
  bool coin() { return pick(2) == 1; }
  template <class T>
  const T& any(const std::vector<T>& pool) { return pool[pick(pool.size())]; }

  void filler(std::size_t lo, std::size_t hi) {
    const std::size_t k = lo + pick(hi - lo + 1);
    for (std::size_t i = 0; i < k; ++i) tokens.push_back(any(kFiller));
  }
  Span words(const std::vector<std::string>& ws) {
    const int b = static_cast<int>(tokens.size());
    tokens.insert(tokens.end(), ws.begin(), ws.end());
    return {b, static_cast<int>(tokens.size())};
  }
  Span opinion_words(const std::string& w) {
    const int b = static_cast<int>(tokens.size());
    if (pick(5) == 0) tokens.push_back("very");
    tokens.push_back(w);
    return {b, static_cast<int>(tokens.size())};
  }
  const Aspect& aspect_in(const std::string& category) {
    std::vector<const Aspect*> pool;
    for (const auto& a : kAspects) {
      if (a.category == category) pool.push_back(&a);
    }
    return *pool[pick(pool.size())];
  }
  const Opinion& facet_opinion(const std::string& category) {
    std::vector<const Opinion*> pool;
    for (const auto& o : kFacetOpinions) {
      if (o.category == category) pool.push_back(&o);
    }
    return *pool[pick(pool.size())];
  }

  void basic_group() {
    const auto& a = any(kAspects);
    const auto& o = any(kOpinions);
    if (coin()) {
      auto as = words(a.words);
      filler(0, 2);
      quads.push_back({as, a.category, opinion_words(o.word), o.polarity});
    } else {
      auto os = opinion_words(o.word);
      filler(0, 2);
      quads.push_back({words(a.words), a.category, os, o.polarity});
    }
  }

  void one_to_many_group() {
    const bool hub_first = coin();
    if (coin()) {
      const auto& a = any(kAspects);
      const auto& o1 = any(kOpinions);
      const auto& o2 = any(kOpinions);
      Span as{}, s1{}, s2{};
      if (hub_first) {
        as = words(a.words); filler(0, 2); s1 = opinion_words(o1.word); filler(1, 2); s2 = opinion_words(o2.word);
      } else {
        s1 = opinion_words(o1.word); filler(1, 2); s2 = opinion_words(o2.word); filler(0, 2); as = words(a.words);
      }
      quads.push_back({as, a.category, s1, o1.polarity});
      quads.push_back({as, a.category, s2, o2.polarity});
    } else {
      const auto& o = any(kOpinions);
      const auto& a1 = any(kAspects);
      const auto& a2 = any(kAspects);
      Span os{}, s1{}, s2{};
      if (hub_first) {
        os = opinion_words(o.word); filler(0, 2); s1 = words(a1.words); filler(1, 2); s2 = words(a2.words);
      } else {
        s1 = words(a1.words); filler(1, 2); s2 = words(a2.words); filler(0, 2); os = opinion_words(o.word);
      }
      quads.push_back({s1, a1.category, os, o.polarity});
      quads.push_back({s2, a2.category, os, o.polarity});
    }
  }

  void mono_group() {
    if (coin()) {
      const auto& o = any(kFacetOpinions);
      quads.push_back({std::nullopt, o.category, opinion_words(o.word), o.polarity});
    } else {
      const auto p = kPolarities[pick(kPolarities.size())];
      const auto& a = any(kAspects);
      tokens.push_back(kImplicitOpinionCue[polarity_index(p)]);
      filler(0, 1);
      quads.push_back({words(a.words), a.category, std::nullopt, p});
    }
  }

  void bi_group() {
    const auto p = kPolarities[pick(kPolarities.size())];
    const auto& c = any(synthetic_categories());
    tokens.push_back(kSentenceCue[polarity_index(p)]);
    filler(0, 1);
    tokens.push_back(kCategoryCue.at(c));
    quads.push_back({std::nullopt, c, std::nullopt, p});
  }

  // The chain's lower value pairs with the nearer term, so the nearer term
  // carries the larger label.
  void cross_group() {
    const bool hub_first = coin();
    if (coin()) {
      const auto& m = any(kMultiFacet);
      const auto& base = *std::find_if(kAspects.begin(), kAspects.end(),
                                       [&](const Aspect& a) { return a.words == std::vector<std::string>{m.word}; });
      const auto& general = any(kOpinions);
      const auto& facet = facet_opinion(m.facet);
      const bool facet_near = m.facet > base.category;
      const std::string& near_word = facet_near ? facet.word : general.word;
      const std::string& far_word = facet_near ? general.word : facet.word;
      Span as{}, near{}, far{};
      if (hub_first) {
        as = words(base.words); filler(0, 2); near = opinion_words(near_word); filler(1, 2); far = opinion_words(far_word);
      } else {
        far = opinion_words(far_word); filler(1, 2); near = opinion_words(near_word); filler(0, 2); as = words(base.words);
      }
      quads.push_back({as, facet_near ? facet.category : base.category, near,
                       facet_near ? facet.polarity : general.polarity});
      quads.push_back({as, facet_near ? base.category : facet.category, far,
                       facet_near ? general.polarity : facet.polarity});
    } else {
      // Positive sorts before negative, so the negative reading is nearer.
      const auto& o = any(kContextOpinions);
      const auto& pos = aspect_in(o.positive_with);
      const auto& neg = aspect_in(o.negative_with);
      Span os{}, near{}, far{};
      if (hub_first) {
        os = opinion_words(o.word); filler(0, 2); near = words(neg.words); filler(1, 2); far = words(pos.words);
      } else {
        far = words(pos.words); filler(1, 2); near = words(neg.words); filler(0, 2); os = opinion_words(o.word);
      }
      quads.push_back({near, neg.category, os, Polarity::Negative});
      quads.push_back({far, pos.category, os, Polarity::Positive});
    }
  }

  std::vector<std::string> tokens;
  std::vector<SentimentQuadruple> quads;

 private:
  std::mt19937_64& rng_;
};

}  // namespace

const std::vector<std::string>& synthetic_categories() {
  static const std::vector<std::string> cats = {kAmbience, kFood, kLaptop, kPrice, kRestaurant, kService};
  return cats;
}

CorpusRecord synthetic_record(SituationTag tag, std::uint64_t seed) {
  if (tag == SituationTag::Unparseable) throw ContractViolation("cannot synthesize an unparseable record");
  std::mt19937_64 rng(seed);
  for (int attempt = 0; attempt < 100; ++attempt) {
    Builder b(rng);
    b.filler(0, 2);
    const bool extra_before = tag != SituationTag::BiImplicit && b.pick(3) == 0;
    const bool extra_after = tag != SituationTag::BiImplicit && b.pick(3) == 0;
    if (extra_before) {
      b.basic_group();
      b.filler(1, 3);
    }
    switch (tag) {
      case SituationTag::Basic: b.basic_group(); break;
      case SituationTag::OneToMany: b.one_to_many_group(); break;
      case SituationTag::MonoImplicit: b.mono_group(); break;
      case SituationTag::BiImplicit: b.bi_group(); break;
      case SituationTag::CrossMapping: b.cross_group(); break;
      case SituationTag::Unparseable: break;
    }
    if (extra_after) {
      b.filler(1, 3);
      b.basic_group();
    }
    b.filler(0, 2);
    b.tokens.push_back(".");
    CorpusRecord r{b.tokens, b.quads, Split::Train, 0};
    if (validate_parseable(to_sentence(r, false)).tag == tag) return r;
  }
  throw ContractViolation("synthetic generator failed to produce the requested situation");
}

std::vector<CorpusRecord> synthetic_corpus(std::size_t count, std::uint64_t seed) {
  static constexpr SituationTag kCycle[] = {SituationTag::Basic, SituationTag::OneToMany, SituationTag::MonoImplicit,
                                            SituationTag::BiImplicit, SituationTag::CrossMapping};
  std::mt19937_64 seeds(seed);
  std::vector<CorpusRecord> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    auto r = synthetic_record(kCycle[i % 5], seeds());
    r.source_line = static_cast<int>(i + 1);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace otp
