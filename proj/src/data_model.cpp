#include "dtscore/data_model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

#include "dtscore/error.hpp"
#include "dtscore/text.hpp"

namespace dtscore {

RatingScale rating_scale(RatingKind kind) noexcept {
  switch (kind) {
    case RatingKind::Originality: return {0.0, 4.0};
    case RatingKind::Flexibility: return {1.0, 5.0};
  }
  return {0.0, 0.0};
}

std::string_view rating_kind_name(RatingKind kind) noexcept {
  return kind == RatingKind::Originality ? "originality" : "flexibility";
}

std::optional<RatingKind> parse_rating_kind(std::string_view name) noexcept {
  if (name == "originality") return RatingKind::Originality;
  if (name == "flexibility") return RatingKind::Flexibility;
  return std::nullopt;
}

EmbeddingVector::EmbeddingVector(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) {
    throw Error(Errc::InvalidArgument, "embedding vector must have dim > 0");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw Error(Errc::InvalidArgument, "embedding component " + std::to_string(i) + " is not finite");
    }
  }
}

ResponseRecord validate_record(ResponseRecord record) {
  auto where = [&] {
    return "subject '" + record.subject_id + "', prompt '" + record.prompt_id + "', order " +
           std::to_string(record.order);
  };
  if (record.subject_id.empty()) throw Error(Errc::InvalidRecord, "empty subject_id");
  if (record.prompt_id.empty()) throw Error(Errc::InvalidRecord, "empty prompt_id");
  if (record.order < 1) throw Error(Errc::InvalidRecord, "order must be >= 1 (" + where() + ")");
  record.response_text = text::trim(record.response_text);
  if (record.response_text.empty()) {
    throw Error(Errc::InvalidRecord, "empty response_text (" + where() + ")");
  }
  return record;
}

std::vector<SubjectTrial> build_trials(std::span<const ResponseRecord> records) {
  std::map<std::pair<std::string, std::string>, std::vector<ResponseRecord>> groups;
  for (const auto& r : records) {
    groups[{r.subject_id, r.prompt_id}].push_back(r);
  }

  std::vector<SubjectTrial> trials;
  trials.reserve(groups.size());
  for (auto& [key, rows] : groups) {
    std::sort(rows.begin(), rows.end(),
              [](const ResponseRecord& a, const ResponseRecord& b) { return a.order < b.order; });
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const int expected = static_cast<int>(i) + 1;
      if (i > 0 && rows[i].order == rows[i - 1].order) {
        throw Error(Errc::DuplicateOrder, "subject '" + key.first + "', prompt '" + key.second +
                                              "' has order " + std::to_string(rows[i].order) +
                                              " more than once");
      }
      if (rows[i].order != expected) {
        throw Error(Errc::OrderGap, "subject '" + key.first + "', prompt '" + key.second +
                                        "' is missing order " + std::to_string(expected));
      }
    }
    trials.push_back(SubjectTrial{key.first, key.second, std::move(rows)});
  }
  return trials;
}

std::vector<ResponseRecord> flatten_trials(std::span<const SubjectTrial> trials) {
  std::vector<ResponseRecord> out;
  for (const auto& t : trials) {
    out.insert(out.end(), t.responses.begin(), t.responses.end());
  }
  return out;
}

}  // namespace dtscore
