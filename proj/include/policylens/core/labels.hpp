#pragma once

#include <array>
#include <bitset>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

namespace policylens {

/// The 21 GDPR Art. 13/14 transparency requirements, in canonical order.
enum class Requirement : std::uint8_t {
  ControllerName,
  ControllerContact,
  DpoContact,
  DataCategories,
  ProcessingPurpose,
  LegalBasis,
  LegitimateInterests,
  SourceOfData,
  RetentionPeriod,
  DataRecipients,
  ThirdCountryTransfers,
  MandatoryDisclosure,
  AutomatedDecisionMaking,
  RightToAccess,
  RightToRectification,
  RightToErasure,
  RightToRestrict,
  RightToObject,
  RightToPortability,
  RightToWithdrawConsent,
  RightToLodgeComplaint,
};

inline constexpr std::size_t kRequirementCount = 21;

using LabelVector = std::bitset<kRequirementCount>;

struct RequirementInfo {
  Requirement id;
  std::string_view name;        ///< canonical string used on the wire
  std::string_view references;  ///< all GDPR references, e.g. "13(1)(a), 14(1)(a)"
  std::string_view article;     ///< primary article cited in prompts
  std::string_view example;     ///< short illustrative phrase
  std::string_view color;       ///< display color shared by exports and the review UI
};

std::span<const RequirementInfo, kRequirementCount> all_requirements() noexcept;

const RequirementInfo& info(Requirement r) noexcept;

std::string_view to_string(Requirement r) noexcept;

/// Exact, case-sensitive lookup of a canonical label string.
std::optional<Requirement> requirement_from_string(std::string_view name) noexcept;

constexpr std::size_t index_of(Requirement r) noexcept {
  return static_cast<std::size_t>(r);
}

inline Requirement requirement_at(std::size_t index) noexcept {
  return static_cast<Requirement>(index);
}

enum class ElementType : std::uint8_t { Headline, ListItem, TableCell, TableHeader, Text };

std::string_view to_string(ElementType t) noexcept;
std::optional<ElementType> element_type_from_string(std::string_view s) noexcept;

/// HTML tag of a context element; closed set.
enum class ContextTag : std::uint8_t { Div, H1, H2, H3, H4, H5, H6, Li, P, Td, Th };

std::string_view to_string(ContextTag t) noexcept;
std::optional<ContextTag> context_tag_from_string(std::string_view s) noexcept;

}  // namespace policylens
