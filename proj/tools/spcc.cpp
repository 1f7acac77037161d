// spcc: command line front end of the control center engine.
//
// Exit codes: 0 success, 2 validation findings of severity reject, 1 errors.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "spcc/error.hpp"
#include "spcc/http_api.hpp"
#include "spcc/service.hpp"
#include "spcc/timestamp.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitRejected = 2;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw spcc::StorageError("cannot read '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw spcc::StorageError("cannot write '" + path + "'");
}

std::string store_root(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("SPCC_STORE"); env && *env) return env;
  return "spcc-store";
}

// Principal used by local commands: the named role (or the first
// all-groups role) with full access to the local store.
spcc::Principal local_principal(const spcc::ControlCenter& center, const std::string& project,
                                const std::string& role, const std::string& group) {
  const json info = center.project_info(project);
  spcc::Principal p{"cli", role, group};
  if (p.role_id.empty()) {
    for (const auto& r : info.at("roles")) {
      if (r.at("scope") == "all-groups") {
        p.role_id = r.at("role_id").get<std::string>();
        break;
      }
    }
    if (p.role_id.empty()) throw spcc::AccessDenied("project defines no all-groups role");
  }
  return p;
}

std::string fmt_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string render_text(const spcc::ViewsResponse& r) {
  std::ostringstream out;
  out << "project " << r.project_id << "  snapshot v" << r.snapshot_version << "  catena v" << r.catena_version
      << "\n";
  for (const auto& v : r.views) {
    out << "\n== " << v.title << " [" << v.mechanism << "] role=" << v.role_id << " drill=" << v.drill_path << "\n";
    for (const auto& p : v.panels) {
      out << "-- " << p.label << " (" << (p.kind.empty() ? "-" : p.kind) << ", " << p.state << ")";
      if (!p.error.empty()) out << " error: " << p.error;
      out << "\n";
      for (const auto& [k, n] : p.status_counts) out << "   " << k << ": " << n << "\n";
      for (const auto& row : p.rows) {
        out << "   " << (row.key.empty() ? "*" : row.key);
        if (!row.subject_id.empty()) out << " " << row.subject_id;
        for (const auto& [name, value] : row.values) out << " " << name << "=" << fmt_number(value);
        if (!row.status.empty()) out << " " << row.status;
        out << "\n";
      }
    }
  }
  return out.str();
}

bool has_rejects(const std::vector<spcc::ValidationFinding>& findings) {
  for (const auto& f : findings) {
    if (f.severity == spcc::Severity::kReject) return true;
  }
  return false;
}

void print_receipt(const spcc::IngestReceipt& r) {
  std::cout << to_json(r).dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Software project control center"};
  app.require_subcommand(1);
  std::string store_flag;
  app.add_option("--store", store_flag, "Store root (default: $SPCC_STORE or ./spcc-store)");

  std::string bundle_dir;
  std::string project_id;
  auto* init = app.add_subcommand("init", "Register a project from a bundle directory");
  init->add_option("bundle", bundle_dir, "Directory holding project.json")->required()->check(CLI::ExistingDirectory);
  init->add_option("--project", project_id, "Project id (default: project.json project_id)");

  auto* validate = app.add_subcommand("validate", "Cross-validate a bundle without registering it");
  validate->add_option("bundle", bundle_dir, "Directory holding project.json")->required()->check(CLI::ExistingDirectory);

  std::string data_file;
  std::string source_id;
  std::string format_name;
  auto* ingest = app.add_subcommand("ingest", "Ingest a measurement file");
  ingest->add_option("project", project_id, "Project id")->required();
  ingest->add_option("file", data_file, "CSV or JSON-lines file")->required()->check(CLI::ExistingFile);
  ingest->add_option("--source", source_id, "Source id (default: the project's first source)");
  ingest->add_option("--format", format_name, "csv or json-lines (default: by file extension)")
      ->check(CLI::IsMember({"csv", "json-lines"}));

  std::string out_file;
  auto* run = app.add_subcommand("run", "Evaluate the catena on the latest snapshot");
  run->add_option("project", project_id, "Project id")->required();
  run->add_option("-o,--out", out_file, "Write the result JSON here (default: stdout)");

  std::string role;
  std::string group;
  std::string report_format = "text";
  auto* report = app.add_subcommand("report", "Print the views of one role");
  report->add_option("project", project_id, "Project id")->required();
  report->add_option("--role", role, "Role id or title")->required();
  report->add_option("--group", group, "Group of an own-group principal");
  report->add_option("--format", report_format, "json or text")->check(CLI::IsMember({"json", "text"}));
  report->add_option("-o,--out", out_file, "Write the report here (default: stdout)");

  auto* package = app.add_subcommand("package", "Package the evaluated catena into the experience base");
  package->add_option("project", project_id, "Project id")->required();

  int port = 8080;
  std::string host = "127.0.0.1";
  auto* serve = app.add_subcommand("serve", "Run the HTTP API");
  serve->add_option("--port", port, "TCP port")->check(CLI::Range(1, 65535));
  serve->add_option("--host", host, "Bind address");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*validate) {
      const json bundle = spcc::load_bundle_dir(bundle_dir);
      const std::string id = bundle.value("project_id", fs::path(bundle_dir).filename().string());
      const auto reg = spcc::registration_from_json(id, bundle);
      const auto registry = spcc::TechniqueRegistry::with_builtins();
      const auto blocking = spcc::registration_findings(reg, registry);
      const auto report_all = spcc::validate_catena(reg.catena, registry, reg.plan, &reg.roles);
      for (const auto& line : report_all.lines()) std::cout << line << "\n";
      for (const auto& line : blocking) {
        if (line.rfind("coverage ", 0) == 0 || line.rfind("baseline ", 0) == 0) std::cout << line << "\n";
      }
      for (const auto& sheet : spcc::derive_collection_plan(reg.plan)) {
        std::cout << "sheet " << sheet.sheet_id << ":";
        for (const auto& m : sheet.metric_ids) std::cout << " " << m;
        std::cout << "\n";
      }
      std::cout << (blocking.empty() ? "valid" : "invalid") << "\n";
      return blocking.empty() ? kExitOk : kExitRejected;
    }

    if (*serve) {
      spcc::ControlCenter center(spcc::ServiceOptions{store_root(store_flag), {}});
      const char* admin = std::getenv("SPCC_ADMIN_TOKEN");
      spcc::HttpApi api(center, admin ? admin : "");
      std::cerr << "spcc serving " << center.projects().size() << " project(s) on " << host << ":" << port << "\n";
      return api.serve(host, port) ? kExitOk : kExitError;
    }

    spcc::ControlCenter center(spcc::ServiceOptions{store_root(store_flag), {}});

    if (*init) {
      json bundle = spcc::load_bundle_dir(bundle_dir);
      if (project_id.empty()) project_id = bundle.value("project_id", fs::path(bundle_dir).filename().string());
      bundle["project_id"] = project_id;
      center.register_project(spcc::registration_from_json(project_id, bundle), &bundle);
      std::cout << center.project_info(project_id).dump(2) << "\n";
      return kExitOk;
    }

    if (*ingest) {
      if (source_id.empty()) {
        const auto sources = center.project_info(project_id).at("sources");
        if (sources.empty()) throw spcc::UnknownSource("project '" + project_id + "' has no sources");
        source_id = sources.front().at("source").get<std::string>();
      }
      if (format_name.empty()) {
        const auto ext = fs::path(data_file).extension().string();
        format_name = (ext == ".jsonl" || ext == ".ndjson") ? "json-lines" : "csv";
      }
      const auto format = format_name == "csv" ? spcc::RecordFormat::kCsv : spcc::RecordFormat::kJsonLines;
      const auto receipt = center.ingest(project_id, source_id, read_file(data_file), format);
      print_receipt(receipt);
      return has_rejects(receipt.findings) ? kExitRejected : kExitOk;
    }

    if (*run) {
      const auto result = center.evaluate_latest(project_id);
      write_output(out_file, to_json(*result).dump(2) + "\n");
      return result->failures().empty() ? kExitOk : kExitError;
    }

    if (*report) {
      const auto principal = local_principal(center, project_id, "", "");
      spcc::Principal who = principal;
      if (!group.empty()) who = spcc::Principal{"cli", role, group};
      const auto views = center.get_views(project_id, who, role);
      write_output(out_file, report_format == "json" ? to_json(views).dump(2) + "\n" : render_text(views));
      return kExitOk;
    }

    if (*package) {
      center.evaluate_latest(project_id);
      const auto pkg = center.package(project_id, local_principal(center, project_id, "", ""));
      std::cout << pkg.package_id << "\n";
      return kExitOk;
    }
  } catch (const spcc::ValidationFailed& e) {
    std::cerr << "error: ValidationFailed\n";
    for (const auto& f : e.findings()) std::cerr << "  " << f << "\n";
    return kExitRejected;
  } catch (const spcc::Error& e) {
    std::cerr << "error: " << e.code() << ": " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitOk;
}
