#include "policylens/core/labels.hpp"

namespace policylens {

namespace {

using R = Requirement;

constexpr std::array<RequirementInfo, kRequirementCount> kRequirements{{
    {R::ControllerName, "Controller Name", "13(1)(a), 14(1)(a)", "13(1)(a)", "AppDeveloper Ltd", "#e6194b"},
    {R::ControllerContact, "Controller Contact", "13(1)(a), 14(1)(a)", "13(1)(a)", "email@appdeveloper.com", "#3cb44b"},
    {R::DpoContact, "DPO Contact", "13(1)(b), 14(1)(b)", "13(1)(b)", "dpo@appdeveloper.com", "#ffe119"},
    {R::DataCategories, "Data Categories", "14(1)(d)", "14(1)(d)", "e-mail address", "#4363d8"},
    {R::ProcessingPurpose, "Processing Purpose", "13(1)(c), 14(1)(c)", "13(1)(c)", "to improve our services", "#f58231"},
    {R::LegalBasis, "Legal Basis for Processing", "13(1)(c), 14(1)(c)", "13(1)(c)", "your consent", "#911eb4"},
    {R::LegitimateInterests, "Legitimate Interests for Processing", "13(1)(d)", "13(1)(d)", "to protect our services", "#46f0f0"},
    {R::SourceOfData, "Source of Data", "14(2)(f)", "14(2)(f)", "from third parties", "#f032e6"},
    {R::RetentionPeriod, "Data Retention Period", "13(2)(a), 14(2)(a)", "13(2)(a)", "for 6 months", "#bcf60c"},
    {R::DataRecipients, "Data Recipients", "13(1)(e), 14(1)(e)", "13(1)(e)", "Google Analytics", "#fabebe"},
    {R::ThirdCountryTransfers, "Third-country Transfers", "13(1)(f), 14(1)(f)", "13(1)(f)", "United States", "#008080"},
    {R::MandatoryDisclosure, "Mandatory Data Disclosure", "13(2)(e)", "13(2)(e)", "you are required by law to provide your data", "#e6beff"},
    {R::AutomatedDecisionMaking, "Automated Decision-Making", "13(2)(f), 14(2)(f)", "13(2)(f)", "profile building", "#9a6324"},
    {R::RightToAccess, "Right to Access", "13(2)(b), 14(2)(c)", "13(2)(b)", "you have the right to access your data", "#fffac8"},
    {R::RightToRectification, "Right to Rectification", "13(2)(b), 14(2)(c)", "13(2)(b)", "you have the right to correct your data", "#800000"},
    {R::RightToErasure, "Right to Erasure", "13(2)(b), 14(2)(c)", "13(2)(b)", "you have the right to delete your data", "#aaffc3"},
    {R::RightToRestrict, "Right to Restrict", "13(2)(b), 14(2)(c)", "13(2)(b)", "you have the right to restrict processing", "#808000"},
    {R::RightToObject, "Right to Object", "13(2)(b), 14(2)(c)", "13(2)(b)", "you have the right to object to processing", "#ffd8b1"},
    {R::RightToPortability, "Right to Portability", "13(2)(b), 14(2)(c)", "13(2)(b)", "you have the right to receive your data", "#000075"},
    {R::RightToWithdrawConsent, "Right to Withdraw Consent", "13(2)(c), 14(2)(d)", "13(2)(c)", "you have the right to withdraw your consent", "#808080"},
    {R::RightToLodgeComplaint, "Right to Lodge Complaint", "13(2)(d), 14(2)(e)", "13(2)(d)", "you have the right to lodge a complaint", "#ff4500"},
}};

constexpr std::array<std::string_view, 5> kElementTypes{
    "headline", "list_item", "table_cell", "table_header", "text"};

constexpr std::array<std::string_view, 11> kContextTags{
    "div", "h1", "h2", "h3", "h4", "h5", "h6", "li", "p", "td", "th"};

}  // namespace

std::span<const RequirementInfo, kRequirementCount> all_requirements() noexcept {
  return kRequirements;
}

const RequirementInfo& info(Requirement r) noexcept { return kRequirements[index_of(r)]; }

std::string_view to_string(Requirement r) noexcept { return info(r).name; }

std::optional<Requirement> requirement_from_string(std::string_view name) noexcept {
  for (const auto& r : kRequirements) {
    if (r.name == name) return r.id;
  }
  return std::nullopt;
}

std::string_view to_string(ElementType t) noexcept {
  return kElementTypes[static_cast<std::size_t>(t)];
}

std::optional<ElementType> element_type_from_string(std::string_view s) noexcept {
  for (std::size_t i = 0; i < kElementTypes.size(); ++i) {
    if (kElementTypes[i] == s) return static_cast<ElementType>(i);
  }
  return std::nullopt;
}

std::string_view to_string(ContextTag t) noexcept {
  return kContextTags[static_cast<std::size_t>(t)];
}

std::optional<ContextTag> context_tag_from_string(std::string_view s) noexcept {
  for (std::size_t i = 0; i < kContextTags.size(); ++i) {
    if (kContextTags[i] == s) return static_cast<ContextTag>(i);
  }
  return std::nullopt;
}

}  // namespace policylens
