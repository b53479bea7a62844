#pragma once

#include <functional>
#include <string_view>

namespace emholo {

using LogSink = std::function<void(std::string_view)>;

/// Routes library warnings. The default sink writes "warning: ..." to stderr.
void set_warning_sink(LogSink sink);
void warn(std::string_view message);

} // namespace emholo
