// Copyright (c) 2026 The oafuse Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Protocol server backed by the tone recognizer. Speaks newline-delimited
// JSON on stdin/stdout, or accepts the same messages as HTTP POST bodies.

#include <chrono>
#include <filesystem>
#include <iostream>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "fmt/format.h"
#include "httplib.h"
#include "oafuse/error.h"
#include "oafuse/service.h"
#include "oafuse/tone_asr.h"

int main(int argc, char **argv) {
  CLI::App app{"Tone-recognizer protocol server"};
  std::string transport = "stdio";
  std::string host = "127.0.0.1";
  int port = 0;
  std::string tone_config;
  std::string posterior_dir = std::filesystem::temp_directory_path().string();
  int delay_ms = 0;
  app.add_option("--transport", transport, "stdio | http")
      ->capture_default_str();
  app.add_option("--host", host)->capture_default_str();
  app.add_option("--port", port, "0 picks a free port")->capture_default_str();
  app.add_option("--tone-config", tone_config, "Tone config JSON");
  app.add_option("--posterior-dir", posterior_dir, "Where OAPM files go")
      ->capture_default_str();
  app.add_option("--delay-ms", delay_ms, "Sleep before each answer")
      ->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  oafuse::ToneConfig cfg;
  try {
    if (!tone_config.empty()) cfg = oafuse::LoadToneConfig(tone_config);
    std::filesystem::create_directories(posterior_dir);
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  oafuse::ToneAsrService service(cfg, posterior_dir);
  auto answer = [&](const std::string &line) {
    if (delay_ms > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms));
    }
    return service.Handle(line);
  };

  if (transport == "stdio") {
    std::ios::sync_with_stdio(false);
    std::string line;
    while (std::getline(std::cin, line)) {
      if (line.empty()) continue;
      std::cout << answer(line) << '\n' << std::flush;
    }
    return 0;
  }
  if (transport != "http") {
    std::cerr << "error: --transport must be stdio or http\n";
    return 1;
  }

  httplib::Server server;
  server.Post("/transcribe",
              [&](const httplib::Request &req, httplib::Response &res) {
                res.set_content(answer(req.body), "application/json");
              });
  int bound = port;
  if (port == 0) {
    bound = server.bind_to_any_port(host);
  } else if (!server.bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound < 0) {
    std::cerr << fmt::format("error: cannot bind {}:{}\n", host, port);
    return 3;
  }
  std::cout << fmt::format("listening on http://{}:{}/transcribe\n", host,
                           bound)
            << std::flush;
  server.listen_after_bind();
  return 0;
}
