#include "spcc/ingestion.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>

#include <nlohmann/json.hpp>

#include "spcc/csv.hpp"
#include "spcc/error.hpp"
#include "spcc/gqm_plan.hpp"
#include "spcc/hashing.hpp"

namespace spcc {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(RecordFormat format) {
  return format == RecordFormat::kCsv ? "csv" : "json-lines";
}

std::optional<RecordFormat> record_format_from_content_type(std::string_view content_type) {
  const auto semi = content_type.find(';');
  std::string type(content_type.substr(0, semi));
  std::transform(type.begin(), type.end(), type.begin(), [](unsigned char c) { return std::tolower(c); });
  while (!type.empty() && type.back() == ' ') type.pop_back();
  if (type == "text/csv" || type == "csv") return RecordFormat::kCsv;
  if (type == "application/x-ndjson" || type == "application/jsonl" || type == "application/x-jsonlines" ||
      type == "application/json-lines" || type == "json-lines") {
    return RecordFormat::kJsonLines;
  }
  return std::nullopt;
}

std::string_view to_string(Severity severity) {
  return severity == Severity::kWarning ? "warning" : "reject";
}

std::string_view to_string(FindingCode code) {
  switch (code) {
    case FindingCode::kOutOfRange: return "OUT_OF_RANGE";
    case FindingCode::kUnknownMetric: return "UNKNOWN_METRIC";
    case FindingCode::kUnknownStep: return "UNKNOWN_STEP";
    case FindingCode::kBadTimestamp: return "BAD_TIMESTAMP";
    case FindingCode::kUnitMismatch: return "UNIT_MISMATCH";
    case FindingCode::kDuplicate: return "DUPLICATE";
    case FindingCode::kMalformed: return "MALFORMED";
    case FindingCode::kBadValue: return "BAD_VALUE";
    case FindingCode::kProjectMismatch: return "PROJECT_MISMATCH";
  }
  return "UNKNOWN";
}

namespace {

constexpr const char* kRequiredColumns[] = {"timestamp", "project", "process_step", "metric",
                                            "subject",   "value",   "unit"};

ValidationFinding reject(std::size_t index, FindingCode code, std::string message) {
  return {index, Severity::kReject, code, std::move(message)};
}

ParsedBatch parse_csv(std::string_view bytes, std::string_view default_source) {
  ParsedBatch out;
  auto rows = csv::parse(bytes);
  if (rows.empty()) return out;
  const auto& header = rows.front();
  if (header.malformed) throw ParseError("measurement CSV header: " + header.error);

  std::map<std::string, std::size_t> column;
  for (std::size_t i = 0; i < header.fields.size(); ++i) column[header.fields[i]] = i;
  for (const char* c : kRequiredColumns) {
    if (!column.count(c)) throw ParseError(std::string("measurement CSV header lacks column '") + c + "'");
  }
  const auto source_col = column.find("source");

  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const std::size_t index = r - 1;
    if (row.malformed) {
      out.findings.push_back(reject(index, FindingCode::kMalformed, "line " + std::to_string(row.line) + ": " + row.error));
      continue;
    }
    if (row.fields.size() != header.fields.size()) {
      out.findings.push_back(reject(index, FindingCode::kMalformed,
                                    "line " + std::to_string(row.line) + ": expected " +
                                        std::to_string(header.fields.size()) + " fields, got " +
                                        std::to_string(row.fields.size())));
      continue;
    }
    RawRecord rec;
    rec.index = index;
    rec.timestamp = row.fields[column["timestamp"]];
    rec.project_id = row.fields[column["project"]];
    rec.step_path = row.fields[column["process_step"]];
    rec.metric_id = row.fields[column["metric"]];
    rec.subject_id = row.fields[column["subject"]];
    rec.value = row.fields[column["value"]];
    rec.unit = row.fields[column["unit"]];
    rec.source_id = source_col != column.end() && !row.fields[source_col->second].empty()
                        ? row.fields[source_col->second]
                        : std::string(default_source);
    out.records.push_back(std::move(rec));
  }
  return out;
}

ParsedBatch parse_json_lines(std::string_view bytes, std::string_view default_source) {
  ParsedBatch out;
  std::size_t index = 0;
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    auto end = bytes.find('\n', pos);
    if (end == std::string_view::npos) end = bytes.size();
    std::string_view line = bytes.substr(pos, end - pos);
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;

    const std::size_t i = index++;
    json obj = json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) {
      out.findings.push_back(reject(i, FindingCode::kMalformed, "line is not a JSON object"));
      continue;
    }
    RawRecord rec;
    rec.index = i;
    std::string missing;
    auto field = [&](const char* key, std::string& dst) {
      if (!obj.contains(key)) {
        if (missing.empty()) missing = key;
        return;
      }
      const auto& v = obj.at(key);
      if (v.is_string()) {
        dst = v.get<std::string>();
      } else if (v.is_number()) {
        dst = v.dump();
      } else if (missing.empty()) {
        missing = key;
      }
    };
    field("timestamp", rec.timestamp);
    field("project", rec.project_id);
    field("process_step", rec.step_path);
    field("metric", rec.metric_id);
    field("subject", rec.subject_id);
    field("value", rec.value);
    field("unit", rec.unit);
    if (!missing.empty()) {
      out.findings.push_back(reject(i, FindingCode::kMalformed, "field '" + missing + "' missing or not a scalar"));
      continue;
    }
    if (obj.contains("source") && obj.at("source").is_string()) rec.source_id = obj.at("source").get<std::string>();
    if (rec.source_id.empty()) rec.source_id = std::string(default_source);
    out.records.push_back(std::move(rec));
  }
  return out;
}

std::optional<double> parse_decimal(std::string_view text) {
  if (text.empty()) return std::nullopt;
  double v = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) return std::nullopt;
  return v;
}

}  // namespace

ParsedBatch parse_records(std::string_view bytes, RecordFormat format, std::string_view default_source) {
  if (!is_valid_utf8(bytes)) throw EncodingError("measurement payload is not valid UTF-8");
  if (bytes.size() >= 3 && static_cast<unsigned char>(bytes[0]) == 0xEF &&
      static_cast<unsigned char>(bytes[1]) == 0xBB && static_cast<unsigned char>(bytes[2]) == 0xBF) {
    bytes.remove_prefix(3);
  }
  return format == RecordFormat::kCsv ? parse_csv(bytes, default_source) : parse_json_lines(bytes, default_source);
}

std::size_t ValidationResult::warnings() const {
  return static_cast<std::size_t>(std::count_if(findings.begin(), findings.end(), [](const ValidationFinding& f) {
    return f.severity == Severity::kWarning;
  }));
}

std::size_t ValidationResult::rejected() const {
  std::set<std::size_t> rows;
  for (const auto& f : findings) {
    if (f.severity == Severity::kReject) rows.insert(f.index);
  }
  return rows.size();
}

ValidationResult validate_records(const std::vector<RawRecord>& records, const GqmPlan& plan,
                                  std::string_view project_id, const std::set<DuplicateKey>* known) {
  ValidationResult out;
  std::set<DuplicateKey> seen;
  for (const auto& r : records) {
    const Metric* metric = plan.metric(r.metric_id);
    if (!metric) {
      out.findings.push_back(reject(r.index, FindingCode::kUnknownMetric, "metric '" + r.metric_id + "' is not in the plan"));
      continue;
    }
    if (!plan.steps.contains(r.step_path)) {
      out.findings.push_back(reject(r.index, FindingCode::kUnknownStep,
                                    "step '" + r.step_path + "' is not in the process step tree"));
      continue;
    }
    if (r.unit != metric->unit) {
      out.findings.push_back(reject(r.index, FindingCode::kUnitMismatch,
                                    "unit '" + r.unit + "' differs from metric unit '" + metric->unit + "'"));
      continue;
    }
    const auto ts = parse_iso8601(r.timestamp);
    if (!ts) {
      out.findings.push_back(reject(r.index, FindingCode::kBadTimestamp, "timestamp '" + r.timestamp + "' is not ISO-8601"));
      continue;
    }
    const auto value = parse_decimal(r.value);
    if (!value) {
      out.findings.push_back(reject(r.index, FindingCode::kBadValue, "value '" + r.value + "' is not a decimal number"));
      continue;
    }
    if (!project_id.empty() && r.project_id != project_id) {
      out.findings.push_back(reject(r.index, FindingCode::kProjectMismatch,
                                    "record addressed to project '" + r.project_id + "'"));
      continue;
    }

    DuplicateKey key{*ts, r.metric_id, r.step_path, r.subject_id, r.source_id};
    if ((known && known->count(key)) || !seen.insert(key).second) {
      out.findings.push_back({r.index, Severity::kWarning, FindingCode::kDuplicate,
                              "duplicate of an accepted record; dropped"});
      continue;
    }
    if (*value < metric->min || *value > metric->max) {
      std::ostringstream msg;
      msg << "value " << r.value << " outside plausible range [" << metric->min << ", " << metric->max << "]";
      out.findings.push_back({r.index, Severity::kWarning, FindingCode::kOutOfRange, msg.str()});
    }
    out.accepted.push_back({r.index, r.metric_id, MeasurementPoint{*ts, r.step_path, r.subject_id, *value, r.unit, r.source_id}});
  }
  return out;
}

void merge_points(std::map<std::string, DataEntry, std::less<>>& entries, const std::vector<AcceptedPoint>& accepted,
                  const GqmPlan& plan) {
  std::set<std::string> touched;
  for (const auto& a : accepted) {
    auto it = entries.find(a.metric_id);
    if (it == entries.end()) {
      const Metric* m = plan.metric(a.metric_id);
      it = entries.emplace(a.metric_id, DataEntry{a.metric_id, m ? m->unit : a.point.unit, {}}).first;
    }
    it->second.series.push_back(a.point);
    touched.insert(a.metric_id);
  }
  for (const auto& id : touched) {
    auto& series = entries.find(id)->second.series;
    std::stable_sort(series.begin(), series.end(),
                     [](const MeasurementPoint& x, const MeasurementPoint& y) { return x.timestamp < y.timestamp; });
  }
}

std::string_view to_string(SourceKind kind) {
  switch (kind) {
    case SourceKind::kCsvFile: return "csv-file";
    case SourceKind::kJsonLinesFile: return "json-lines-file";
    case SourceKind::kApiPush: return "api-push";
  }
  return "unknown";
}

std::optional<RecordFormat> SourceAdapter::format() const {
  switch (kind) {
    case SourceKind::kCsvFile: return RecordFormat::kCsv;
    case SourceKind::kJsonLinesFile: return RecordFormat::kJsonLines;
    case SourceKind::kApiPush: return std::nullopt;
  }
  return std::nullopt;
}

std::vector<SourceAdapter> sources_from_json(const json& doc) {
  if (!doc.is_array()) throw ParseError("sources: expected an array");
  std::vector<SourceAdapter> out;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& s = doc[i];
    const std::string where = "sources[" + std::to_string(i) + "]";
    if (!s.is_object() || !s.contains("source") || !s.at("source").is_string() ||
        s.at("source").get<std::string>().empty()) {
      throw ParseError(where + ".source: expected a non-empty string");
    }
    SourceAdapter a;
    a.source_id = s.at("source").get<std::string>();
    const std::string kind = s.value("kind", std::string("api-push"));
    if (kind == "csv-file") {
      a.kind = SourceKind::kCsvFile;
    } else if (kind == "json-lines-file") {
      a.kind = SourceKind::kJsonLinesFile;
    } else if (kind == "api-push") {
      a.kind = SourceKind::kApiPush;
    } else {
      throw ParseError(where + ".kind: unknown source kind '" + kind + "'");
    }
    a.location = s.value("location", std::string());
    for (const auto& other : out) {
      if (other.source_id == a.source_id) throw ParseError(where + ": duplicate source '" + a.source_id + "'");
    }
    out.push_back(std::move(a));
  }
  return out;
}

json to_json(const std::vector<SourceAdapter>& sources) {
  json out = json::array();
  for (const auto& s : sources) {
    json o = {{"source", s.source_id}, {"kind", to_string(s.kind)}};
    if (!s.location.empty()) o["location"] = s.location;
    out.push_back(std::move(o));
  }
  return out;
}

json to_json(const IngestReceipt& receipt) {
  json findings = json::array();
  for (const auto& f : receipt.findings) {
    findings.push_back({{"index", f.index},
                        {"severity", to_string(f.severity)},
                        {"code", to_string(f.code)},
                        {"message", f.message}});
  }
  return {{"accepted", receipt.accepted},       {"warnings", receipt.warnings},
          {"rejected", receipt.rejected},       {"snapshot_version", receipt.snapshot_version},
          {"batch_hash", receipt.batch_hash},   {"findings", findings}};
}

// ---------------------------------------------------------------------------
// Storage

namespace {

json batch_to_json(const CommittedBatch& b) {
  json points = json::array();
  for (const auto& a : b.points) {
    points.push_back({{"index", a.index},
                      {"metric", a.metric_id},
                      {"timestamp", a.point.timestamp},
                      {"process_step", a.point.step_path},
                      {"subject", a.point.subject_id},
                      {"value", a.point.value},
                      {"unit", a.point.unit},
                      {"source", a.point.source_id}});
  }
  return {{"version", b.version}, {"batch_hash", b.batch_hash}, {"source", b.source_id}, {"points", points}};
}

CommittedBatch batch_from_json(const json& j) {
  CommittedBatch b;
  b.version = j.at("version").get<std::uint64_t>();
  b.batch_hash = j.at("batch_hash").get<std::string>();
  b.source_id = j.at("source").get<std::string>();
  for (const auto& p : j.at("points")) {
    AcceptedPoint a;
    a.index = p.at("index").get<std::size_t>();
    a.metric_id = p.at("metric").get<std::string>();
    a.point.timestamp = p.at("timestamp").get<Timestamp>();
    a.point.step_path = p.at("process_step").get<std::string>();
    a.point.subject_id = p.at("subject").get<std::string>();
    a.point.value = p.at("value").get<double>();
    a.point.unit = p.at("unit").get<std::string>();
    a.point.source_id = p.at("source").get<std::string>();
    b.points.push_back(std::move(a));
  }
  return b;
}

std::string batch_file_name(std::uint64_t version) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%08llu.json", static_cast<unsigned long long>(version));
  return buf;
}

}  // namespace

FileBatchSink::FileBatchSink(std::string dir) : dir_(std::move(dir)) {}

void FileBatchSink::commit(const CommittedBatch& batch) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) throw StorageError("cannot create '" + dir_ + "': " + ec.message());
  const fs::path target = fs::path(dir_) / batch_file_name(batch.version);
  const fs::path tmp = fs::path(dir_) / (batch_file_name(batch.version) + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << batch_to_json(batch).dump(1) << '\n';
    out.flush();
    if (!out) throw StorageError("cannot write '" + tmp.string() + "'");
  }
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw StorageError("cannot commit '" + target.string() + "'");
  }
}

std::vector<CommittedBatch> FileBatchSink::load(const std::string& dir) {
  std::vector<CommittedBatch> out;
  std::error_code ec;
  if (!fs::exists(dir, ec)) return out;
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir, ec)) {
    if (e.path().extension() == ".json") files.push_back(e.path());
  }
  if (ec) throw StorageError("cannot list '" + dir + "': " + ec.message());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    std::ifstream in(f, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    try {
      out.push_back(batch_from_json(json::parse(buf.str())));
    } catch (const json::exception& e) {
      throw StorageError("corrupt batch file '" + f.string() + "': " + e.what());
    }
  }
  return out;
}

MeasurementStore::MeasurementStore(std::string project_id, std::shared_ptr<const GqmPlan> plan, BaselineSet baselines,
                                   std::vector<SourceAdapter> sources, std::unique_ptr<BatchSink> sink)
    : project_id_(std::move(project_id)), plan_(std::move(plan)), sources_(std::move(sources)), sink_(std::move(sink)) {
  if (!plan_) throw PreconditionViolation("measurement store needs a plan");
  auto snap = std::make_shared<DataSnapshot>();
  snap->steps = plan_->steps;
  snap->baselines = std::move(baselines);
  snapshot_ = std::move(snap);
}

std::shared_ptr<const DataSnapshot> MeasurementStore::snapshot() const {
  std::shared_lock lock(mutex_);
  return snapshot_;
}

std::uint64_t MeasurementStore::version() const {
  std::shared_lock lock(mutex_);
  return snapshot_->version;
}

void MeasurementStore::apply(const CommittedBatch& batch) {
  auto next = std::make_shared<DataSnapshot>(*snapshot_);
  next->version = batch.version;
  merge_points(next->entries, batch.points, *plan_);
  for (const auto& a : batch.points) {
    next->as_of = std::max(next->as_of, a.point.timestamp);
    keys_.emplace(a.point.timestamp, a.metric_id, a.point.step_path, a.point.subject_id, a.point.source_id);
  }
  batch_hashes_.insert(batch.batch_hash);
  snapshot_ = std::move(next);
}

IngestReceipt MeasurementStore::ingest(std::string_view source_id, std::string_view payload, RecordFormat format) {
  const auto source = std::find_if(sources_.begin(), sources_.end(),
                                   [&](const SourceAdapter& s) { return s.source_id == source_id; });
  if (source == sources_.end()) {
    throw UnknownSource("source '" + std::string(source_id) + "' is not registered for project '" + project_id_ + "'");
  }
  const std::string hash = sha256_hex(std::string(source_id) + '\n' + std::string(payload));
  const auto parsed = parse_records(payload, format, source_id);

  std::unique_lock lock(mutex_);
  if (batch_hashes_.count(hash)) throw DuplicateBatch("batch " + hash.substr(0, 12) + " was already ingested");

  auto result = validate_records(parsed.records, *plan_, project_id_, &keys_);
  IngestReceipt receipt;
  receipt.batch_hash = hash;
  receipt.findings = parsed.findings;
  receipt.findings.insert(receipt.findings.end(), result.findings.begin(), result.findings.end());
  std::stable_sort(receipt.findings.begin(), receipt.findings.end(),
                   [](const ValidationFinding& a, const ValidationFinding& b) { return a.index < b.index; });
  result.findings = receipt.findings;
  receipt.accepted = result.accepted.size();
  receipt.warnings = result.warnings();
  receipt.rejected = result.rejected();
  receipt.snapshot_version = snapshot_->version;
  if (result.accepted.empty()) return receipt;

  CommittedBatch batch{snapshot_->version + 1, hash, std::string(source_id), std::move(result.accepted)};
  if (sink_) {
    try {
      sink_->commit(batch);
    } catch (const StorageError&) {
      throw;
    } catch (const std::exception& e) {
      throw StorageError(e.what());
    }
  }
  apply(batch);
  receipt.snapshot_version = batch.version;
  return receipt;
}

void MeasurementStore::replay(const std::vector<CommittedBatch>& batches) {
  std::unique_lock lock(mutex_);
  for (const auto& b : batches) {
    if (b.version != snapshot_->version + 1) {
      throw StorageError("batch version " + std::to_string(b.version) + " does not follow " +
                         std::to_string(snapshot_->version));
    }
    apply(b);
  }
}

}  // namespace spcc
