#include "policylens/llm/mock.hpp"

#include <algorithm>
#include <array>
#include <regex>
#include <set>
#include <tuple>

#include <nlohmann/json.hpp>

#include "policylens/core/error.hpp"
#include "policylens/core/labels.hpp"
#include "policylens/util/hash.hpp"
#include "policylens/util/text.hpp"

namespace policylens::llm {

CannedChatProvider::CannedChatProvider(std::map<std::string, std::string> replies,
                                       Fallback fallback)
    : replies_(std::move(replies)), fallback_(std::move(fallback)) {}

void CannedChatProvider::add(const ChatRequest& request, std::string reply) {
  std::lock_guard lock(mu_);
  replies_[request_hash(request)] = std::move(reply);
}

std::string CannedChatProvider::complete(const ChatRequest& request) {
  ++calls_;
  {
    std::lock_guard lock(mu_);
    auto it = replies_.find(request_hash(request));
    if (it != replies_.end()) return it->second;
  }
  if (fallback_) return fallback_(request);
  throw Error(ErrorCode::ProviderUnavailable, "no canned reply for request");
}

SequenceChatProvider::SequenceChatProvider(std::deque<std::string> replies)
    : replies_(std::move(replies)) {}

std::string SequenceChatProvider::complete(const ChatRequest& request) {
  std::lock_guard lock(mu_);
  seen_.push_back(request);
  if (replies_.empty()) throw Error(ErrorCode::ProviderUnavailable, "reply sequence exhausted");
  std::string reply = std::move(replies_.front());
  replies_.pop_front();
  return reply;
}

std::vector<ChatRequest> SequenceChatProvider::requests() const {
  std::lock_guard lock(mu_);
  return seen_;
}

// ---------------------------------------------------------------------------
// Heuristic provider

namespace {

using R = Requirement;

struct LexiconEntry {
  R label;
  std::string_view phrase;  // lowercase
};

constexpr std::array<LexiconEntry, 58> kLexicon{{
    {R::DataCategories, "name"},
    {R::DataCategories, "e-mail address"},
    {R::DataCategories, "email address"},
    {R::DataCategories, "ip address"},
    {R::DataCategories, "ip-addresses"},
    {R::DataCategories, "device identifiers"},
    {R::DataCategories, "device models"},
    {R::DataCategories, "location data"},
    {R::DataCategories, "precise location"},
    {R::DataCategories, "phone number"},
    {R::DataCategories, "postal address"},
    {R::DataCategories, "payment information"},
    {R::DataCategories, "usage data"},
    {R::DataCategories, "date of birth"},
    {R::DataCategories, "contacts"},
    {R::DataCategories, "crash logs"},
    {R::ProcessingPurpose, "to provide our services"},
    {R::ProcessingPurpose, "to improve our services"},
    {R::ProcessingPurpose, "to improve the app"},
    {R::ProcessingPurpose, "to contact you"},
    {R::ProcessingPurpose, "to respond to your requests"},
    {R::ProcessingPurpose, "to show you personalised ads"},
    {R::ProcessingPurpose, "to show you personalized ads"},
    {R::ProcessingPurpose, "for analytics"},
    {R::ProcessingPurpose, "for marketing purposes"},
    {R::ProcessingPurpose, "to prevent fraud"},
    {R::LegalBasis, "your consent"},
    {R::LegalBasis, "performance of a contract"},
    {R::LegalBasis, "legal obligation"},
    {R::LegalBasis, "art. 6(1)(a) gdpr"},
    {R::LegalBasis, "art. 6(1)(b) gdpr"},
    {R::LegalBasis, "art. 6(1)(f) gdpr"},
    {R::LegitimateInterests, "to protect our services"},
    {R::LegitimateInterests, "to ensure the security of our services"},
    {R::SourceOfData, "from third parties"},
    {R::SourceOfData, "from publicly available sources"},
    {R::DataRecipients, "google analytics"},
    {R::DataRecipients, "firebase"},
    {R::DataRecipients, "facebook"},
    {R::DataRecipients, "service providers"},
    {R::DataRecipients, "advertising partners"},
    {R::DataRecipients, "law enforcement authorities"},
    {R::ThirdCountryTransfers, "united states"},
    {R::ThirdCountryTransfers, "outside the european economic area"},
    {R::ThirdCountryTransfers, "outside the eea"},
    {R::MandatoryDisclosure, "you are required by law to provide"},
    {R::AutomatedDecisionMaking, "automated decision-making"},
    {R::AutomatedDecisionMaking, "profiling"},
    {R::RightToAccess, "right to access"},
    {R::RightToRectification, "right to rectification"},
    {R::RightToRectification, "right to correct"},
    {R::RightToErasure, "right to erasure"},
    {R::RightToErasure, "right to delete"},
    {R::RightToRestrict, "right to restrict"},
    {R::RightToObject, "right to object"},
    {R::RightToPortability, "right to data portability"},
    {R::RightToWithdrawConsent, "withdraw your consent"},
    {R::RightToLodgeComplaint, "lodge a complaint"},
}};

bool word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || (static_cast<unsigned char>(c) >= 0x80);
}

// Negated when a negation word appears earlier in the same sentence, close by.
bool negated_before(const std::string& lower, std::size_t pos) {
  std::size_t start = pos > 40 ? pos - 40 : 0;
  const std::size_t stop = lower.find_last_of(".;:!?", pos == 0 ? 0 : pos - 1);
  if (stop != std::string::npos && stop + 1 > start && stop < pos) start = stop + 1;
  const std::string window = " " + lower.substr(start, pos - start) + " ";
  for (std::string_view cue : {" not ", " never ", "n't ", " no "}) {
    if (window.find(cue) != std::string::npos) return true;
  }
  return false;
}

struct Hit {
  std::size_t pos;
  R label;
  std::string span;
  bool performed;
};

std::vector<Hit> lexicon_hits(const std::string& passage) {
  const std::string lower = text::to_lower_ascii(passage);
  std::vector<Hit> hits;
  std::set<std::tuple<std::size_t, std::size_t, R>> taken;
  for (const auto& entry : kLexicon) {
    std::size_t from = 0;
    while (true) {
      std::size_t pos = lower.find(entry.phrase, from);
      if (pos == std::string::npos) break;
      from = pos + 1;
      std::size_t end = pos + entry.phrase.size();
      if ((pos > 0 && word_char(lower[pos - 1])) || (end < lower.size() && word_char(lower[end]))) {
        continue;
      }
      // include a directly preceding "your" as a restrictive clause
      if (entry.label == R::DataCategories && pos >= 5 && lower.compare(pos - 5, 5, "your ") == 0 &&
          (pos == 5 || !word_char(lower[pos - 6]))) {
        pos -= 5;
      }
      // a bare "name" is only a data category with a possessive in front
      if (entry.phrase == "name" && (pos + 4 == end)) continue;
      if (!taken.emplace(pos, end, entry.label).second) continue;
      hits.push_back({pos, entry.label, passage.substr(pos, end - pos), !negated_before(lower, pos)});
    }
  }
  // e-mail style tokens are contact details
  static const std::regex kEmail(R"([A-Za-z0-9._%+-]+@[A-Za-z0-9.-]+\.[A-Za-z]{2,})");
  const bool mentions_dpo = lower.find("data protection officer") != std::string::npos ||
                            lower.find("dpo") != std::string::npos;
  for (auto it = std::sregex_iterator(passage.begin(), passage.end(), kEmail);
       it != std::sregex_iterator(); ++it) {
    const auto pos = static_cast<std::size_t>(it->position());
    hits.push_back({pos, mentions_dpo ? R::DpoContact : R::ControllerContact, it->str(), true});
  }
  static const std::regex kPeriod(R"(for (\d+|one|two|three|six|twelve) (days?|weeks?|months?|years?))",
                                  std::regex::icase);
  for (auto it = std::sregex_iterator(passage.begin(), passage.end(), kPeriod);
       it != std::sregex_iterator(); ++it) {
    hits.push_back({static_cast<std::size_t>(it->position()), R::RetentionPeriod, it->str(), true});
  }
  std::stable_sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
    return std::tie(a.pos, a.label) < std::tie(b.pos, b.label);
  });
  return hits;
}

nlohmann::ordered_json hit_json(R label, const std::string& span, bool performed) {
  nlohmann::ordered_json j;
  j["requirement"] = std::string(to_string(label));
  j["value"] = span;
  j["performed"] = performed;
  return j;
}

std::string detect(const std::string& content) {
  if (text::word_count(content) < 8) return "unknown";
  const std::string lower = text::to_lower_ascii(content);
  int cues = 0;
  for (std::string_view cue : {"privacy", "personal data", "personal information", "data protection",
                               "gdpr", "we collect", "cookies", "third parties"}) {
    if (lower.find(cue) != std::string::npos) ++cues;
  }
  return cues >= 2 ? "true" : "false";
}

}  // namespace

std::string HeuristicChatProvider::complete(const ChatRequest& request) {
  nlohmann::json item = nlohmann::json::parse(request.user_content, nullptr, false);
  if (!item.is_object() || !item.contains("passage") || !item["passage"].is_string()) {
    return detect(request.user_content);
  }
  const std::string passage = item["passage"].get<std::string>();
  const bool headline = item.value("type", "") == "headline";

  auto out = nlohmann::ordered_json::array();
  std::set<std::tuple<std::string, std::string, bool>> present;
  if (item.contains("annotations") && item["annotations"].is_array()) {
    // Self-correction: keep existing annotations whose span still occurs.
    for (const auto& a : item["annotations"]) {
      if (!a.is_object() || !a.contains("value") || !a["value"].is_string()) continue;
      const std::string value = a["value"].get<std::string>();
      if (passage.find(value) == std::string::npos && value.find("[...]") == std::string::npos) continue;
      const auto req = a.value("requirement", std::string());
      const bool performed = a.value("performed", true);
      if (present.emplace(req, value, performed).second) out.push_back(nlohmann::ordered_json(a));
    }
  }
  if (!headline) {
    for (const auto& h : lexicon_hits(passage)) {
      const std::string req(to_string(h.label));
      if (present.emplace(req, h.span, h.performed).second) {
        out.push_back(hit_json(h.label, h.span, h.performed));
      }
    }
  }
  return out.dump(2);
}

// ---------------------------------------------------------------------------
// Embedders

HashingEmbedder::HashingEmbedder(std::size_t dimension) : dimension_(dimension) {
  if (dimension_ == 0) throw Error(ErrorCode::ConfigError, "embedding dimension must be positive");
}

std::size_t HashingEmbedder::bucket(std::string_view token) const {
  return static_cast<std::size_t>(hash::fnv1a64(token) % dimension_);
}

EmbeddingVector HashingEmbedder::embed(std::string_view text_in) {
  std::vector<double> v(dimension_, 0.0);
  const std::string lower = text::to_lower_ascii(text_in);
  std::size_t i = 0;
  bool any = false;
  while (i < lower.size()) {
    while (i < lower.size() && !word_char(lower[i])) ++i;
    const std::size_t start = i;
    while (i < lower.size() && word_char(lower[i])) ++i;
    if (i > start) {
      v[bucket(std::string_view(lower).substr(start, i - start))] += 1.0;
      any = true;
    }
  }
  if (!any) v[bucket("")] = 1.0;
  return normalized(std::move(v));
}

std::string HashingEmbedder::describe() const {
  return "mock:hashing-" + std::to_string(dimension_);
}

OrthogonalEmbedder::OrthogonalEmbedder(std::size_t capacity) : capacity_(capacity) {}

EmbeddingVector OrthogonalEmbedder::embed(std::string_view text_in) {
  std::size_t slot = 0;
  {
    std::lock_guard lock(mu_);
    auto [it, inserted] = index_.try_emplace(std::string(text_in), index_.size());
    slot = it->second;
    if (slot >= capacity_) {
      index_.erase(it);
      throw Error(ErrorCode::ProviderUnavailable, "orthogonal embedder capacity exhausted");
    }
  }
  std::vector<double> v(capacity_, 0.0);
  v[slot] = 1.0;
  return EmbeddingVector{std::move(v)};
}

TableEmbedder::TableEmbedder(std::map<std::string, std::vector<double>> table) {
  for (auto& [key, vec] : table) {
    if (dimension_ == 0) dimension_ = vec.size();
    if (vec.size() != dimension_) throw Error(ErrorCode::ConfigError, "table embedder: mixed dimensions");
    table_.emplace(key, normalized(std::move(vec)));
  }
}

EmbeddingVector TableEmbedder::embed(std::string_view text_in) {
  auto it = table_.find(text_in);
  if (it == table_.end()) {
    throw Error(ErrorCode::ProviderUnavailable, "table embedder has no vector for '" + std::string(text_in) + "'");
  }
  return it->second;
}

EmbeddingVector CachingEmbedder::embed(std::string_view text_in) {
  {
    std::lock_guard lock(mu_);
    auto it = cache_.find(std::string(text_in));
    if (it != cache_.end()) return it->second;
  }
  EmbeddingVector v = inner_.embed(text_in);
  std::lock_guard lock(mu_);
  return cache_.try_emplace(std::string(text_in), std::move(v)).first->second;
}

}  // namespace policylens::llm
