#include <algorithm>
#include <chrono>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>

#include "criteria.hpp"

namespace sdist::acceptance {

std::string fmt(double value, int precision) {
  std::ostringstream out;
  out.precision(precision);
  out << value;
  return out.str();
}

namespace {

std::vector<Criterion> all_criteria() {
  std::vector<Criterion> all;
  for (auto group : {distance_criteria, experiment_criteria, fitting_criteria}) {
    auto part = group();
    all.insert(all.end(), part.begin(), part.end());
  }
  return all;
}

bool run_one(const Criterion& c) {
  const auto start = std::chrono::steady_clock::now();
  Outcome outcome;
  try {
    outcome = c.run();
  } catch (const std::exception& e) {
    outcome = {false, std::string("exception: ") + e.what()};
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (c.time_limit_seconds > 0.0 && seconds > c.time_limit_seconds) {
    outcome.pass = false;
    outcome.detail += "; runtime " + fmt(seconds, 3) + " s exceeds " + fmt(c.time_limit_seconds, 3) + " s";
  }
  std::cout << (outcome.pass ? "PASS " : "FAIL ") << c.name << ": " << outcome.detail << " [" << fmt(seconds, 3)
            << " s]" << std::endl;
  return outcome.pass;
}

int usage(const char* argv0) {
  std::cerr << "usage: " << argv0 << " [--list | --criterion NAME ...]\n";
  return 2;
}

}  // namespace
}  // namespace sdist::acceptance

int main(int argc, char** argv) {
  using namespace sdist::acceptance;
  const auto criteria = all_criteria();
  std::vector<std::string> selected;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--list") {
      for (const auto& c : criteria) std::cout << c.name << "  " << c.summary << "\n";
      return 0;
    }
    if (arg == "--criterion" && i + 1 < argc) {
      selected.emplace_back(argv[++i]);
      continue;
    }
    return usage(argv[0]);
  }
  bool ok = true;
  std::size_t ran = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), c.name) == selected.end()) continue;
    ok = run_one(c) && ok;
    ++ran;
  }
  if (ran == 0) {
    std::cerr << "no matching criterion\n";
    return 2;
  }
  return ok ? 0 : 1;
}
