#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "spcc/service.hpp"

namespace spcc::bench {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

inline ProjectRegistration case_study() {
  return registration_from_json("ukl_course", load_bundle_dir(SPCC_CASE_STUDY_DIR));
}

inline std::string case_study_csv(int group) {
  return read_file(std::string(SPCC_CASE_STUDY_DIR) + "/measurements_g" + std::to_string(group) + ".csv");
}

// `rows` effort records spread over the course steps and three groups.
inline std::string synthetic_csv(int rows) {
  static const char* steps[] = {"/requirements/elicitation", "/requirements/specification", "/design/architecture",
                                "/design/detailed", "/implementation/coding", "/test/integration"};
  std::string out = "timestamp,project,process_step,metric,subject,value,unit\n";
  for (int i = 0; i < rows; ++i) {
    const int day = 1 + (i / 60) % 28;
    const int minute = i % 60;
    char stamp[32];
    std::snprintf(stamp, sizeof stamp, "2005-11-%02dT09:%02d:%02dZ", day, minute, (i / 1680) % 60);
    out += stamp;
    out += ",ukl_course,";
    out += steps[i % 6];
    out += ",effort,g" + std::to_string(1 + i % 3) + "," + std::to_string(1 + i % 7) + ".25,h\n";
  }
  return out;
}

}  // namespace spcc::bench
