#include "emholo/log.hpp"

#include <iostream>
#include <mutex>
#include <string>

namespace emholo {

namespace {

std::mutex sink_mutex;

LogSink& sink() {
    static LogSink s = [](std::string_view msg) { std::cerr << "warning: " << msg << '\n'; };
    return s;
}

} // namespace

void set_warning_sink(LogSink s) {
    std::lock_guard lock(sink_mutex);
    sink() = s ? std::move(s) : LogSink([](std::string_view) {});
}

void warn(std::string_view message) {
    std::lock_guard lock(sink_mutex);
    sink()(message);
}

} // namespace emholo
