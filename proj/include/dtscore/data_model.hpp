#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dtscore {

struct PromptItem {
  std::string prompt_id;
  std::string prompt_text;
};

// One AUT answer. `order` is the 1-based generation order within the
// (subject_id, prompt_id) trial and is never inferred from file position.
struct ResponseRecord {
  std::string subject_id;
  std::string prompt_id;
  int order = 0;
  std::string response_text;
  std::optional<std::string> group_label;

  friend bool operator==(const ResponseRecord&, const ResponseRecord&) = default;
};

struct SubjectTrial {
  std::string subject_id;
  std::string prompt_id;
  std::vector<ResponseRecord> responses;  // ascending by order, never empty
};

enum class RatingKind { Originality, Flexibility };

struct RatingScale {
  double min;
  double max;
};

// Originality uses the 0-4 creativity scale, snapshot flexibility 1-5.
RatingScale rating_scale(RatingKind kind) noexcept;
std::string_view rating_kind_name(RatingKind kind) noexcept;
std::optional<RatingKind> parse_rating_kind(std::string_view name) noexcept;

struct HumanRating {
  std::string subject_id;
  std::string prompt_id;
  int order = 0;
  std::string rater_id;
  double rating = 0.0;
  RatingKind kind = RatingKind::Originality;
};

// Fixed-length vector of finite reals. Immutable once built.
class EmbeddingVector {
 public:
  // Throws InvalidArgument for an empty or non-finite payload.
  explicit EmbeddingVector(std::vector<double> values);

  std::size_t dim() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }

  friend bool operator==(const EmbeddingVector&, const EmbeddingVector&) = default;

 private:
  std::vector<double> values_;
};

struct ResponseScoreRow {
  std::string subject_id;
  std::string prompt_id;
  int order = 0;
  std::string model_id;
  double originality_distance = 0.0;
  int elaboration = 0;
};

struct SubjectScoreRow {
  std::string subject_id;
  std::string prompt_id;
  std::string model_id;
  double originality_topk = 0.0;
  double flexibility_sum = 0.0;
  int fluency = 0;
};

struct EnsembleScoreRow {
  std::string subject_id;
  std::string prompt_id;
  double originality_z_mean = 0.0;
  double flexibility_z_mean = 0.0;
  std::string group_label;  // empty when the dataset carries no labels
};

struct ScoreTable {
  std::vector<ResponseScoreRow> response_scores;
  std::vector<SubjectScoreRow> subject_scores;
  std::vector<EnsembleScoreRow> ensemble_scores;
};

// Trims response_text and checks record-level invariants. Throws InvalidRecord.
ResponseRecord validate_record(ResponseRecord record);

// Groups records into trials ordered by (subject_id, prompt_id). Throws
// DuplicateOrder or OrderGap when a trial's orders are not exactly 1..k.
std::vector<SubjectTrial> build_trials(std::span<const ResponseRecord> records);

std::vector<ResponseRecord> flatten_trials(std::span<const SubjectTrial> trials);

}  // namespace dtscore
