#include <gtest/gtest.h>

#include <chrono>
#include <thread>

#include <unistd.h>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "fixtures.hpp"
#include "spcc/http_api.hpp"
#include "spcc/service.hpp"

namespace spcc {
namespace {

using nlohmann::json;

constexpr const char* kPm = "pm-7f3c9a1e";
constexpr const char* kDevG1 = "dev-g1-5a0c7731";
constexpr const char* kAdmin = "admin-secret";

class HttpApiTest : public ::testing::Test {
 protected:
  HttpApiTest() : center_(make_options()), api_(center_, kAdmin) {}

  static ServiceOptions make_options() {
    ServiceOptions o;
    o.clock = [] { return Timestamp{1700000000}; };
    return o;
  }

  ApiResponse call(const std::string& method, const std::string& path, const std::string& token = {},
                   std::string body = {}, std::map<std::string, std::string> query = {},
                   std::map<std::string, std::string> headers = {}) {
    ApiRequest req;
    req.method = method;
    req.path = path;
    req.query = std::move(query);
    req.headers = std::move(headers);
    if (!token.empty()) req.headers["authorization"] = "Bearer " + token;
    req.body = std::move(body);
    return api_.handle(req);
  }

  ApiResponse register_course() {
    return call("PUT", "/projects/ukl_course", kAdmin, fixtures::case_study_bundle().dump());
  }

  ApiResponse push(int group, const std::string& token = kPm) {
    return call("POST", "/projects/ukl_course/measurements", token, fixtures::case_study_measurements(group),
                {{"source", "g" + std::to_string(group) + "-tracker"}}, {{"Content-Type", "text/csv"}});
  }

  ControlCenter center_;
  HttpApi api_;
};

TEST_F(HttpApiTest, RegisterAndReadProject) {
  EXPECT_EQ(call("PUT", "/projects/ukl_course", "", fixtures::case_study_bundle().dump()).status, 401);
  auto created = register_course();
  ASSERT_EQ(created.status, 201) << created.body;
  EXPECT_EQ(register_course().status, 409);
  auto info = call("GET", "/projects/ukl_course", kPm);
  EXPECT_EQ(info.status, 200);
  EXPECT_EQ(json::parse(info.body)["project_id"], "ukl_course");
  EXPECT_EQ(call("GET", "/projects/ukl_course").status, 401);
  EXPECT_EQ(call("GET", "/projects/ukl_course", "wrong").status, 401);
  EXPECT_EQ(call("GET", "/projects/other", kPm).status, 404);
  EXPECT_EQ(call("DELETE", "/projects/ukl_course", kPm).status, 405);
  EXPECT_EQ(call("GET", "/elsewhere", kPm).status, 404);
}

TEST_F(HttpApiTest, InvalidBundleIs422WithFindings) {
  auto bundle = fixtures::case_study_bundle();
  bundle["catena"]["data_entries"].push_back({{"id", "v"}, {"metric", "velocity"}});
  auto res = call("PUT", "/projects/ukl_course", kAdmin, bundle.dump());
  EXPECT_EQ(res.status, 422);
  auto doc = json::parse(res.body);
  EXPECT_EQ(doc["error"], "ValidationFailed");
  EXPECT_FALSE(doc["findings"].empty());
  EXPECT_EQ(call("PUT", "/projects/ukl_course", kAdmin, "{not json").status, 400);
}

TEST_F(HttpApiTest, IngestReceiptsAndDuplicateBatches) {
  register_course();
  auto first = push(1);
  ASSERT_EQ(first.status, 200) << first.body;
  auto receipt = json::parse(first.body);
  EXPECT_EQ(receipt["accepted"], 52);
  EXPECT_EQ(receipt["snapshot_version"], 1);

  auto views_before = call("GET", "/projects/ukl_course/views", kPm);
  auto again = push(1);
  EXPECT_EQ(again.status, 409);
  EXPECT_EQ(json::parse(again.body)["error"], "DuplicateBatch");
  EXPECT_EQ(call("GET", "/projects/ukl_course/views", kPm).body, views_before.body);

  auto no_type = call("POST", "/projects/ukl_course/measurements", kPm, "x", {{"source", "g1-tracker"}});
  EXPECT_EQ(no_type.status, 400);
  auto bad_source = call("POST", "/projects/ukl_course/measurements", kPm, fixtures::case_study_measurements(2),
                         {{"source", "ghost"}}, {{"Content-Type", "text/csv"}});
  EXPECT_EQ(bad_source.status, 404);
}

TEST_F(HttpApiTest, ApiPushSourceChosenWhenUnnamed) {
  register_course();
  auto res = call("POST", "/projects/ukl_course/measurements", kPm,
                  "timestamp,project,process_step,metric,subject,value,unit\n"
                  "2005-12-01T09:00:00Z,ukl_course,/test/system,effort,g1,2,h\n",
                  {}, {{"Content-Type", "text/csv"}});
  ASSERT_EQ(res.status, 200) << res.body;
  EXPECT_EQ(json::parse(res.body)["accepted"], 1);
}

TEST_F(HttpApiTest, ViewsCiteVersionsAndAreByteStable) {
  register_course();
  for (int g = 1; g <= 3; ++g) push(g);
  auto a = call("GET", "/projects/ukl_course/views", kPm);
  auto b = call("GET", "/projects/ukl_course/views", kPm);
  ASSERT_EQ(a.status, 200);
  EXPECT_EQ(a.body, b.body);
  auto doc = json::parse(a.body);
  EXPECT_EQ(doc["snapshot_version"], 3);
  EXPECT_EQ(doc["catena_version"], 1);
  for (const auto& v : doc["views"]) {
    EXPECT_EQ(v["snapshot_version"], 3);
    EXPECT_EQ(v["catena_version"], 1);
  }
  auto alerts = call("GET", "/projects/ukl_course/alerts", kPm);
  EXPECT_EQ(alerts.body, call("GET", "/projects/ukl_course/alerts", kPm).body);
  EXPECT_EQ(json::parse(alerts.body)["alerts"].size(), 4u);
  EXPECT_EQ(call("GET", "/projects/ukl_course/alerts", kPm, "", {{"since", "x"}}).status, 400);
}

TEST_F(HttpApiTest, AccessRules) {
  register_course();
  push(1);
  EXPECT_EQ(call("GET", "/projects/ukl_course/views", kDevG1, "", {{"role", "project manager"}}).status, 403);
  auto own = call("GET", "/projects/ukl_course/views", kDevG1);
  ASSERT_EQ(own.status, 200);
  EXPECT_EQ(json::parse(own.body)["views"].size(), 1u);
  EXPECT_EQ(call("PATCH", "/projects/ukl_course/catena/functions/effort_check", kDevG1, R"({"warn": 0.05})").status,
            403);
  EXPECT_EQ(call("POST", "/projects/ukl_course/package", kDevG1).status, 403);
}

TEST_F(HttpApiTest, DrillPatchHistoryAndPackage) {
  register_course();
  for (int g = 1; g <= 3; ++g) push(g);
  EXPECT_EQ(call("GET", "/projects/ukl_course/views/pm_effort/drill", kPm).status, 400);
  auto drill = call("GET", "/projects/ukl_course/views/pm_effort/drill", kPm, "", {{"step", "/design"}});
  ASSERT_EQ(drill.status, 200) << drill.body;
  EXPECT_EQ(json::parse(drill.body)["drill_path"], "/design");
  EXPECT_EQ(call("GET", "/projects/ukl_course/views/pm_effort/drill", kPm, "", {{"step", "/x"}}).status, 404);
  EXPECT_EQ(call("GET", "/projects/ukl_course/views/ghost/drill", kPm, "", {{"step", "/design"}}).status, 404);

  auto patch = call("PATCH", "/projects/ukl_course/catena/functions/effort_check", kPm, R"({"violation": 0.5})");
  ASSERT_EQ(patch.status, 200) << patch.body;
  auto patched = json::parse(patch.body);
  EXPECT_EQ(patched["catena_version"], 2);
  EXPECT_EQ(patched["params"]["violation"], 0.5);
  EXPECT_EQ(call("PATCH", "/projects/ukl_course/catena/functions/effort_check", kPm, R"({"warn": 0.9})").status,
            422);
  EXPECT_EQ(call("PATCH", "/projects/ukl_course/catena/functions/ghost", kPm, R"({})").status, 404);

  auto history = json::parse(call("GET", "/projects/ukl_course/history", kPm).body);
  EXPECT_EQ(history["versions"].size(), 2u);
  EXPECT_EQ(history["versions"][1]["change"], "reparameterized");

  auto alerts = json::parse(call("GET", "/projects/ukl_course/alerts", kPm, "", {{"since", "3"}}).body);
  EXPECT_EQ(alerts["catena_version"], 2);

  // No store root: packaging has nowhere to write.
  EXPECT_EQ(call("POST", "/projects/ukl_course/package", kPm).status, 500);
}

TEST(HttpServer, ServesOverASocket) {
  ServiceOptions o;
  ControlCenter center(o);
  auto bundle = fixtures::case_study_bundle();
  center.register_project(registration_from_json("ukl_course", bundle), &bundle);
  HttpApi api(center);
  const int port = 18000 + static_cast<int>(::getpid() % 2000);
  std::thread server([&] { api.serve("127.0.0.1", port); });

  httplib::Client client("127.0.0.1", port);
  client.set_bearer_token_auth(kPm);
  httplib::Result res;
  for (int attempt = 0; attempt < 50 && !res; ++attempt) {
    res = client.Get("/projects/ukl_course/views?role=project%20manager");
    if (!res) std::this_thread::sleep_for(std::chrono::milliseconds(50));
  }
  api.stop();
  server.join();
  ASSERT_TRUE(res) << "server did not answer";
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(json::parse(res->body)["views"].size(), 2u);
}

}  // namespace
}  // namespace spcc
