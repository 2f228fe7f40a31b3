#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "delphinet/error.hpp"
#include "delphinet/explanation.hpp"
#include "delphinet/hash.hpp"

namespace delphinet::reporting {

struct SectionSpec {
  std::string_view id;
  std::string_view title;
  bool aligned;  // receives text from the detailed explanation
};

/// The report template. Explanation-aligned sections keep the detailed
/// explanation's order; the free sections frame them.
inline constexpr std::array<SectionSpec, 9> kTemplate = {{
    {"executive_summary", "Executive summary", false},
    {"structure", "Causal structure", true},
    {"priors", "Target probabilities without evidence", true},
    {"source_reliability", "Reliability of the evidence sources", true},
    {"relevance", "Relevance of the evidence", true},
    {"impact", "Impact of the evidence", true},
    {"conclusion", "Conclusion", true},
    {"assumptions", "Assumptions", false},
    {"caveats", "Caveats", false},
}};

inline std::vector<std::string> aligned_section_ids() {
  std::vector<std::string> out;
  for (const auto& s : kTemplate) {
    if (s.aligned) out.emplace_back(s.id);
  }
  return out;
}

/// `generated` blocks came from the explanation tool; `source` records
/// which network version (or adopted report) they came from.
struct Block {
  std::string text;
  bool generated = false;
  std::string source;

  friend bool operator==(const Block&, const Block&) = default;
};

struct QuestionSlot {
  std::string question;
  std::string answer;

  friend bool operator==(const QuestionSlot&, const QuestionSlot&) = default;
};

struct ReportSection {
  std::string id;
  std::string title;
  std::vector<Block> blocks;
  std::vector<QuestionSlot> questions;

  friend bool operator==(const ReportSection&, const ReportSection&) = default;
};

struct ReportDraft {
  std::string title;
  std::vector<ReportSection> sections;
  std::string explanation_version;  // network version of the last autofill

  ReportSection& section(std::string_view id) {
    for (auto& s : sections) {
      if (s.id == id) return s;
    }
    throw Error(ErrorCode::InvalidPayload, "report has no section '" + std::string(id) + "'");
  }

  bool empty() const {
    for (const auto& s : sections) {
      for (const auto& b : s.blocks) {
        if (!b.text.empty()) return false;
      }
      for (const auto& q : s.questions) {
        if (!q.answer.empty()) return false;
      }
    }
    return true;
  }

  friend bool operator==(const ReportDraft&, const ReportDraft&) = default;
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(Block, text, generated, source)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(QuestionSlot, question, answer)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ReportSection, id, title, blocks, questions)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ReportDraft, title, sections, explanation_version)

/// Fresh draft: every template section present and empty, one answer slot
/// per problem question in the conclusion.
inline ReportDraft instantiate_template(const std::string& title, const std::vector<std::string>& questions) {
  ReportDraft draft;
  draft.title = title;
  for (const auto& entry : kTemplate) {
    ReportSection s{std::string(entry.id), std::string(entry.title), {}, {}};
    if (entry.id == "conclusion") {
      for (const auto& q : questions) s.questions.push_back({q, ""});
    }
    draft.sections.push_back(std::move(s));
  }
  return draft;
}

/// Checks that a draft still follows the template (ids, order).
inline void check_template(const ReportDraft& draft) {
  if (draft.sections.size() != kTemplate.size()) {
    throw Error(ErrorCode::InvalidPayload, "report must contain the template's sections");
  }
  for (std::size_t i = 0; i < kTemplate.size(); ++i) {
    if (draft.sections[i].id != kTemplate[i].id) {
      throw Error(ErrorCode::InvalidPayload, "report section " + std::to_string(i) + " must be '" +
                                                 std::string(kTemplate[i].id) + "'");
    }
  }
}

/// Appends the explanation text to each aligned section as a generated block.
/// A previous generated block is replaced; analyst blocks are never touched.
/// `explained_version` is the network version the detail was generated from
/// and must equal `current_version`.
inline ReportDraft autofill_from_explanation(ReportDraft draft, const explanation::ExplanationDetail& detail,
                                             const std::string& explained_version,
                                             const std::string& current_version) {
  if (explained_version != current_version) {
    throw Error(ErrorCode::StaleExplanation,
                "the network changed after the explanation was generated; re-evaluate first");
  }
  check_template(draft);
  for (const auto& section : detail.sections) {
    auto& target = draft.section(section.id);
    std::erase_if(target.blocks, [](const Block& b) { return b.generated; });
    target.blocks.push_back({section.text(), true, "explanation:" + explained_version});
  }
  draft.explanation_version = explained_version;
  return draft;
}

namespace detail {

inline std::string escape_html(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

inline constexpr std::string_view kDraftOpen = "<script type=\"application/json\" id=\"report-draft\">";
inline constexpr std::string_view kDraftClose = "</script>";

}  // namespace detail

/// Portable single-file HTML. The draft itself is embedded as JSON so the
/// file can be read back (see draft_from_html). Generated blocks are marked
/// with data-provenance so tool prose can be told apart from analyst prose.
inline std::string render_html(const ReportDraft& draft) {
  using detail::escape_html;
  std::string out = "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n<title>" +
                    escape_html(draft.title) +
                    "</title>\n<style>body{font-family:sans-serif;max-width:48em;margin:2em auto}"
                    ".generated{border-left:3px solid #88a;padding-left:.6em;color:#334}"
                    "@media print{.generated{border:none}}</style>\n</head>\n<body>\n<h1>" +
                    escape_html(draft.title) + "</h1>\n";
  for (const auto& s : draft.sections) {
    out += "<section id=\"" + escape_html(s.id) + "\">\n<h2>" + escape_html(s.title) + "</h2>\n";
    for (const auto& b : s.blocks) {
      if (b.generated) {
        out += "<div class=\"generated\" data-provenance=\"" + escape_html(b.source) + "\">";
      } else {
        out += "<div class=\"analyst\">";
      }
      std::string para = escape_html(b.text);
      std::string html;
      for (char c : para) html += (c == '\n') ? std::string("<br>\n") : std::string(1, c);
      out += "<p>" + html + "</p></div>\n";
    }
    if (!s.questions.empty()) {
      out += "<ol class=\"questions\">\n";
      for (const auto& q : s.questions) {
        out += "<li><p class=\"question\">" + escape_html(q.question) + "</p><p class=\"answer\">" +
               escape_html(q.answer) + "</p></li>\n";
      }
      out += "</ol>\n";
    }
    out += "</section>\n";
  }
  // "</" cannot appear inside a script element; nlohmann escapes nothing, so
  // split it.
  std::string embedded = nlohmann::json(draft).dump();
  std::string safe;
  for (std::size_t i = 0; i < embedded.size(); ++i) {
    if (embedded[i] == '<' && i + 1 < embedded.size() && embedded[i + 1] == '/') {
      safe += "<\\/";
      ++i;
    } else {
      safe += embedded[i];
    }
  }
  out += std::string(detail::kDraftOpen) + safe + std::string(detail::kDraftClose) + "\n</body>\n</html>\n";
  return out;
}

inline ReportDraft draft_from_html(const std::string& html) {
  auto start = html.find(detail::kDraftOpen);
  if (start == std::string::npos) {
    throw Error(ErrorCode::InvalidDocument, "HTML file carries no embedded report draft");
  }
  start += detail::kDraftOpen.size();
  auto end = html.find(detail::kDraftClose, start);
  if (end == std::string::npos) throw Error(ErrorCode::InvalidDocument, "unterminated report draft");
  try {
    auto draft = nlohmann::json::parse(html.substr(start, end - start)).get<ReportDraft>();
    check_template(draft);
    return draft;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidDocument, std::string("malformed embedded report draft: ") + e.what());
  }
}

/// One rated, shared report considered for automatic selection.
struct Candidate {
  std::string report_id;
  std::int64_t score_sum = 0;
  std::int64_t count = 0;
  std::uint64_t shared_seq = 0;  // lower = shared earlier
};

/// Highest mean rating wins; equal means go to the report shared first.
/// Means are compared exactly (cross-multiplied), not after rounding.
inline std::optional<std::string> select_highest_rated(std::vector<Candidate> candidates) {
  std::erase_if(candidates, [](const Candidate& c) { return c.count == 0; });
  if (candidates.empty()) return std::nullopt;
  auto better = [](const Candidate& a, const Candidate& b) {
    auto lhs = a.score_sum * b.count, rhs = b.score_sum * a.count;
    if (lhs != rhs) return lhs > rhs;
    return a.shared_seq < b.shared_seq;
  };
  return std::min_element(candidates.begin(), candidates.end(), better)->report_id;
}

}  // namespace delphinet::reporting
