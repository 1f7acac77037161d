#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "spcc/measurement.hpp"

namespace spcc {

struct GqmPlan;

enum class RecordFormat { kCsv, kJsonLines };
std::string_view to_string(RecordFormat format);
// "text/csv" and "application/x-ndjson" / "application/jsonl" style types.
std::optional<RecordFormat> record_format_from_content_type(std::string_view content_type);

// One data row as received; fields are kept verbatim.
struct RawRecord {
  std::size_t index = 0;  // 0-based data row (or line) in the payload
  std::string timestamp;
  std::string project_id;
  std::string step_path;
  std::string metric_id;
  std::string subject_id;
  std::string value;
  std::string unit;
  std::string source_id;

  bool operator==(const RawRecord&) const = default;
};

enum class Severity { kWarning, kReject };
std::string_view to_string(Severity severity);

enum class FindingCode {
  kOutOfRange,
  kUnknownMetric,
  kUnknownStep,
  kBadTimestamp,
  kUnitMismatch,
  kDuplicate,
  kMalformed,        // row that cannot be split into the expected fields
  kBadValue,         // value that is not a finite decimal number
  kProjectMismatch,  // row addressed to another project
};
std::string_view to_string(FindingCode code);

struct ValidationFinding {
  std::size_t index = 0;
  Severity severity = Severity::kReject;
  FindingCode code = FindingCode::kMalformed;
  std::string message;

  bool operator==(const ValidationFinding&) const = default;
};

struct ParsedBatch {
  std::vector<RawRecord> records;
  std::vector<ValidationFinding> findings;  // rows that produced no record
};

// CSV header: timestamp,project,process_step,metric,subject,value,unit with an
// optional trailing `source` column; JSON lines use the same field names.
// Records without a source take `default_source`.
// Throws EncodingError for non-UTF-8 input, ParseError for a bad CSV header.
ParsedBatch parse_records(std::string_view bytes, RecordFormat format, std::string_view default_source = {});

// (timestamp, metric, step, subject, source)
using DuplicateKey = std::tuple<Timestamp, std::string, std::string, std::string, std::string>;

struct AcceptedPoint {
  std::size_t index = 0;
  std::string metric_id;
  MeasurementPoint point;

  bool operator==(const AcceptedPoint&) const = default;
};

struct ValidationResult {
  std::vector<AcceptedPoint> accepted;
  std::vector<ValidationFinding> findings;

  std::size_t warnings() const;
  std::size_t rejected() const;
};

// Per record: metric known, step in the plan's tree, unit equal to the
// metric unit, timestamp and value well formed, project matching
// `project_id` when non-empty (all rejects); then exact duplicates of an
// earlier record or of a key in `known` are dropped with a warning; values
// outside the metric range are kept with a warning. Never throws.
ValidationResult validate_records(const std::vector<RawRecord>& records, const GqmPlan& plan,
                                  std::string_view project_id = {},
                                  const std::set<DuplicateKey>* known = nullptr);

// Appends accepted points to per-metric entries, keeping each series in
// timestamp order (stable for equal timestamps).
void merge_points(std::map<std::string, DataEntry, std::less<>>& entries,
                  const std::vector<AcceptedPoint>& accepted, const GqmPlan& plan);

enum class SourceKind { kCsvFile, kJsonLinesFile, kApiPush };
std::string_view to_string(SourceKind kind);

struct SourceAdapter {
  std::string source_id;
  SourceKind kind = SourceKind::kApiPush;
  std::string location;  // file path or credentials reference

  // The parser format for file sources; API pushes declare it per request.
  std::optional<RecordFormat> format() const;

  bool operator==(const SourceAdapter&) const = default;
};

// [{"source", "kind": "csv-file" | "json-lines-file" | "api-push", "location"}]
std::vector<SourceAdapter> sources_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const std::vector<SourceAdapter>& sources);

struct IngestReceipt {
  std::size_t accepted = 0;
  std::size_t warnings = 0;
  std::size_t rejected = 0;
  std::uint64_t snapshot_version = 0;
  std::string batch_hash;
  std::vector<ValidationFinding> findings;
};

nlohmann::json to_json(const IngestReceipt& receipt);

// What a committed batch adds to the store.
struct CommittedBatch {
  std::uint64_t version = 0;
  std::string batch_hash;
  std::string source_id;
  std::vector<AcceptedPoint> points;
};

// Durable storage for committed batches. A throwing commit leaves the store
// unchanged.
class BatchSink {
 public:
  virtual ~BatchSink() = default;
  virtual void commit(const CommittedBatch& batch) = 0;
};

// One JSON file per batch under `dir`, written to a temporary name and
// renamed into place.
class FileBatchSink : public BatchSink {
 public:
  explicit FileBatchSink(std::string dir);
  void commit(const CommittedBatch& batch) override;

  // Committed batches in version order. Throws StorageError.
  static std::vector<CommittedBatch> load(const std::string& dir);

 private:
  std::string dir_;
};

// The measurement data of one project. Batches commit one at a time;
// readers always get a complete immutable snapshot.
class MeasurementStore {
 public:
  MeasurementStore(std::string project_id, std::shared_ptr<const GqmPlan> plan, BaselineSet baselines,
                   std::vector<SourceAdapter> sources, std::unique_ptr<BatchSink> sink = nullptr);

  // Throws UnknownSource, DuplicateBatch (identical content already
  // committed), EncodingError, ParseError, StorageError.
  IngestReceipt ingest(std::string_view source_id, std::string_view payload, RecordFormat format);

  // Re-applies batches read back from storage, without committing them again.
  void replay(const std::vector<CommittedBatch>& batches);

  std::shared_ptr<const DataSnapshot> snapshot() const;
  std::uint64_t version() const;
  const std::vector<SourceAdapter>& sources() const { return sources_; }
  const std::string& project_id() const { return project_id_; }

 private:
  void apply(const CommittedBatch& batch);

  std::string project_id_;
  std::shared_ptr<const GqmPlan> plan_;
  std::vector<SourceAdapter> sources_;
  std::unique_ptr<BatchSink> sink_;

  mutable std::shared_mutex mutex_;
  std::shared_ptr<const DataSnapshot> snapshot_;
  std::set<DuplicateKey> keys_;
  std::set<std::string> batch_hashes_;
};

}  // namespace spcc
