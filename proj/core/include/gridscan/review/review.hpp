// SPDX-FileCopyrightText: 2026 The gridscan authors
// SPDX-License-Identifier: Apache-2.0

#ifndef GRIDSCAN_REVIEW_REVIEW_HPP
#define GRIDSCAN_REVIEW_REVIEW_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gridscan/cloud/class_schema.hpp"
#include "gridscan/error.hpp"
#include "gridscan/pipeline/run.hpp"

namespace gridscan {

/// A review decision that fails validation; the log is left untouched.
class ValidationError : public DataError {
public:
    using DataError::DataError;
};

enum class Verdict { confirm_flag, dismiss_flag, relabel };

std::string_view to_string(Verdict v);
Verdict verdict_from_string(std::string_view s);

struct Relabel {
    std::size_t point_index = 0;  ///< row in the segment's points.ply
    ClassId class_id = 0;

    friend bool operator==(const Relabel&, const Relabel&) = default;
};

struct ReviewDecision {
    std::size_t segment_id = 0;
    Verdict verdict = Verdict::confirm_flag;
    std::vector<Relabel> relabels;
    std::string reviewer;
    std::string timestamp;  ///< filled with the current UTC time when empty
    std::string notes;

    nlohmann::json to_json() const;
    /// Throws ValidationError on missing or mistyped fields. Relabel classes may
    /// be given by id or by name when `schema` is supplied.
    static ReviewDecision from_json(const nlohmann::json& j, const ClassSchema* schema = nullptr);
};

struct ReviewAck {
    std::uint64_t seq = 0;
    std::size_t segment_id = 0;
    nlohmann::json to_json() const { return {{"seq", seq}, {"segment_id", segment_id}}; }
};

struct SegmentPayload {
    nlohmann::json envelope;
    /// float32 xyz recentered on envelope.offset, then uint8 labels, zero
    /// padding to a 4-byte boundary, then float32 margins. Little-endian.
    std::string binary;
};

/// Read-only view of a run directory plus the append-only review log.
/// Reads may run concurrently; appends are serialized internally.
class ReviewService {
public:
    /// A directory without a manifest is served as an empty run.
    explicit ReviewService(std::filesystem::path run_dir);

    const std::filesystem::path& run_dir() const noexcept { return run_dir_; }

    /// Summaries ordered by segment id, including review state from the log.
    nlohmann::json list_segments(bool flagged_only) const;
    /// Throws NotFoundError for unknown or failed segments.
    SegmentPayload get_segment_payload(std::size_t segment_id) const;
    nlohmann::json segment_envelope(std::size_t segment_id) const { return get_segment_payload(segment_id).envelope; }

    void validate(const ReviewDecision& decision) const;
    /// Validates, then appends one JSON line. Throws NotFoundError for unknown
    /// segments and ValidationError for malformed relabels.
    ReviewAck post_review(ReviewDecision decision);

    /// report.json as written by the pipeline.
    nlohmann::json report() const;
    /// Replays the log and writes report.reviewed.json.
    nlohmann::json reviewed_report() const;

    const std::shared_ptr<const ClassSchema>& schema() const noexcept { return schema_; }

private:
    const SegmentRecord& record(std::size_t segment_id) const;

    std::filesystem::path run_dir_;
    std::optional<RunManifest> manifest_;
    std::shared_ptr<const ClassSchema> schema_;
    mutable std::mutex log_mutex_;
    std::uint64_t next_seq_ = 1;
};

struct ReviewedRun {
    nlohmann::json report;
    std::map<std::size_t, std::vector<ClassId>> labels;  ///< revised labels of relabeled segments
};

/// Replays reviews.jsonl in order over report.json: dismiss clears the flag,
/// confirm sets it, relabel overrides point labels with the last decision
/// winning. Writes report.reviewed.json. An empty log reproduces report.json.
ReviewedRun apply_reviews(const std::filesystem::path& run_dir);

/// Decisions in log order; throws DataError on a malformed line.
std::vector<ReviewDecision> read_review_log(const std::filesystem::path& run_dir);

}  // namespace gridscan

#endif  // GRIDSCAN_REVIEW_REVIEW_HPP
