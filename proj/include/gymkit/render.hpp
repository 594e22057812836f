#pragma once

#include <chrono>
#include <cstdio>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <variant>
#include <vector>

#include "gymkit/error.hpp"

namespace gymkit {

enum class RenderMode { human, rgb_array, ansi };

inline std::string_view render_mode_name(RenderMode mode) {
  switch (mode) {
    case RenderMode::human: return "human";
    case RenderMode::rgb_array: return "rgb_array";
    case RenderMode::ansi: return "ansi";
  }
  return "unknown";
}

inline std::optional<RenderMode> parse_render_mode(std::string_view name) {
  if (name == "human") return RenderMode::human;
  if (name == "rgb_array") return RenderMode::rgb_array;
  if (name == "ansi") return RenderMode::ansi;
  return std::nullopt;
}

/// H x W x 3 frame, row-major RGB, 8 bits per channel.
struct Frame {
  std::int64_t height = 0;
  std::int64_t width = 0;
  std::vector<std::uint8_t> pixels;

  Frame() = default;
  Frame(std::int64_t h, std::int64_t w, std::uint8_t fill = 255)
      : height(h), width(w), pixels(static_cast<std::size_t>(h * w * 3), fill) {}

  std::vector<std::int64_t> shape() const { return {height, width, 3}; }

  std::uint8_t* pixel(std::int64_t row, std::int64_t col) {
    return pixels.data() + static_cast<std::size_t>((row * width + col) * 3);
  }
  const std::uint8_t* pixel(std::int64_t row, std::int64_t col) const {
    return pixels.data() + static_cast<std::size_t>((row * width + col) * 3);
  }

  friend bool operator==(const Frame&, const Frame&) = default;
};

/// monostate for human mode (nothing returned), Frame for rgb_array, string for ansi.
using RenderOutput = std::variant<std::monostate, Frame, std::string>;

/// Destination for "human" render mode output.
class FrameSink {
 public:
  virtual ~FrameSink() = default;
  virtual void present(const Frame& frame) = 0;
  virtual void present(const std::string& text) = 0;
};

class TerminalSink : public FrameSink {
 public:
  explicit TerminalSink(std::ostream& out = std::cout) : out_(&out) {}

  void present(const Frame& frame) override {
    *out_ << "<frame " << frame.height << "x" << frame.width << ">\n";
  }
  void present(const std::string& text) override { *out_ << text << std::flush; }

 private:
  std::ostream* out_;
};

/// Writes each frame as a binary PPM file, frame_000000.ppm, frame_000001.ppm, ...
class FrameFileSink : public FrameSink {
 public:
  explicit FrameFileSink(std::filesystem::path directory) : directory_(std::move(directory)) {}

  void present(const Frame& frame) override {
    std::filesystem::create_directories(directory_);
    std::ofstream out(next_path("ppm"), std::ios::binary);
    out << "P6\n" << frame.width << ' ' << frame.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(frame.pixels.data()), static_cast<std::streamsize>(frame.pixels.size()));
  }

  void present(const std::string& text) override {
    std::filesystem::create_directories(directory_);
    std::ofstream(next_path("txt")) << text;
  }

  std::size_t frames_written() const { return count_; }
  const std::filesystem::path& directory() const { return directory_; }

 private:
  std::filesystem::path next_path(const char* extension) {
    char name[32];
    std::snprintf(name, sizeof name, "frame_%06zu.%s", count_++, extension);
    return directory_ / name;
  }

  std::filesystem::path directory_;
  std::size_t count_ = 0;
};

/// Holds frames to the recommended framerate before handing them to a sink.
class PacedPresenter {
 public:
  PacedPresenter(std::shared_ptr<FrameSink> sink, int fps) : sink_(std::move(sink)), fps_(fps) {}

  template <typename T>
  void present(const T& output) {
    if (fps_ > 0) {
      const auto interval = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
          std::chrono::duration<double>(1.0 / fps_));
      if (last_) std::this_thread::sleep_until(*last_ + interval);
      last_ = std::chrono::steady_clock::now();
    }
    sink_->present(output);
  }

  const std::shared_ptr<FrameSink>& sink() const { return sink_; }

 private:
  std::shared_ptr<FrameSink> sink_;
  int fps_;
  std::optional<std::chrono::steady_clock::time_point> last_;
};

}  // namespace gymkit
