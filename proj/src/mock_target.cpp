// The bundled vulnerable web application, served in process on loopback.
// Routes mirror the bundled models: an injectable login that reaches the
// database, a profile editor that plants avatar files, a page include, an
// unrestricted upload, and an injectable user lookup. Leaks always emit
// mock_secret(), never a real file.
#include "dywa/mock_target.hpp"

#include <mutex>
#include <set>
#include <thread>

#include "httplib.h"

namespace dywa {

const std::string& mock_secret() {
  static const std::string secret = "root:x:0:0:root:/root:/bin/bash";
  return secret;
}

namespace {

// crude detector standing in for string concatenation into SQL
bool looks_injected(const std::string& value) {
  return value.find("' OR") != std::string::npos || value.find("'--") != std::string::npos;
}

bool wants_traversal(const std::string& value) {
  return !value.empty() &&
         (value.front() == '/' || value.find("../") != std::string::npos ||
          value.find("..%2f") != std::string::npos || value.find("..%2F") != std::string::npos);
}

std::string basename_of(const std::string& path) {
  size_t slash = path.find_last_of("/\\");
  return slash == std::string::npos ? path : path.substr(slash + 1);
}

std::string cookie_value(const httplib::Request& req, const std::string& name) {
  std::string header = req.get_header_value("Cookie");
  size_t pos = header.find(name + "=");
  if (pos == std::string::npos) return "";
  pos += name.size() + 1;
  size_t end = header.find(';', pos);
  return header.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
}

// target path of an INTO OUTFILE / INTO DUMPFILE clause
std::string outfile_name(const std::string& query) {
  size_t kw = query.find("FILE '");
  if (kw == std::string::npos) return "evil_file.php";
  size_t start = kw + 6;
  size_t end = query.find('\'', start);
  if (end == std::string::npos) return "evil_file.php";
  return basename_of(query.substr(start, end - start));
}

std::string form_value(const httplib::Request& req, const std::string& key) {
  if (req.is_multipart_form_data())
    return req.has_file(key) ? req.get_file_value(key).content : "";
  return req.get_param_value(key);
}

}  // namespace

struct MockTarget::Impl {
  MockSwitches switches;
  std::string secret;
  httplib::Server server;
  std::thread worker;
  int port = 0;

  std::mutex state;
  int session_counter = 0;
  std::set<std::string> sessions;
  std::set<std::string> planted;  // basenames of files written to the fake webroot

  Impl(MockSwitches s, std::string leaked)
      : switches(s), secret(leaked.empty() ? mock_secret() : std::move(leaked)) {
    install();
  }

  std::string issue_session(httplib::Response& res) {
    std::string session = "sess_" + std::to_string(++session_counter);
    sessions.insert(session);
    res.set_header("Set-Cookie", "PHPSESSID=" + session + "; Path=/");
    return session;
  }

  bool authed(const httplib::Request& req) {
    std::string session = cookie_value(req, "PHPSESSID");
    return !session.empty() && sessions.count(session);
  }

  void install() {
    server.Post("/index.php", [this](const httplib::Request& req, httplib::Response& res) {
      std::string username = form_value(req, "username");
      std::lock_guard<std::mutex> lock(state);

      if (username.find("INTO OUTFILE") != std::string::npos ||
          username.find("INTO DUMPFILE") != std::string::npos) {
        if (!switches.db_file_write_priv) {
          res.set_content("ERROR 1045: Access denied for user 'webapp'@'localhost'",
                          "text/plain");
          return;
        }
        planted.insert(outfile_name(username));
        issue_session(res);
        res.set_content("<h1>Welcome admin</h1><p>Query OK, 1 row affected</p>", "text/html");
        return;
      }

      if (username.find("LOAD_FILE(") != std::string::npos) {
        if (!switches.db_file_read_priv) {
          // LOAD_FILE without the privilege yields NULL, so the row comes
          // back empty: logged in, nothing leaked
          issue_session(res);
          res.set_content("<h1>Welcome admin</h1>", "text/html");
          return;
        }
        issue_session(res);
        res.set_content("<h1>Welcome admin</h1><pre>" + secret + "</pre>", "text/html");
        return;
      }

      if (switches.login_sqli && looks_injected(username)) {
        issue_session(res);
        res.set_content("<h1>Welcome admin</h1>", "text/html");
        return;
      }
      res.status = 401;
      res.set_content("Login failed", "text/html");
    });

    // fetching a page; a previously planted file runs and dumps the secret
    server.Get("/index.php", [this](const httplib::Request& req, httplib::Response& res) {
      std::string file = req.get_param_value("file");
      if (file.empty()) {
        res.set_content("<h1>Login</h1>", "text/html");
        return;
      }
      std::lock_guard<std::mutex> lock(state);
      if (planted.count(basename_of(file))) {
        res.set_content("<pre>" + secret + "</pre>", "text/html");
        return;
      }
      res.status = 404;
      res.set_content("No such page", "text/html");
    });

    server.Post("/profile.php", [this](const httplib::Request& req, httplib::Response& res) {
      std::lock_guard<std::mutex> lock(state);
      if (!authed(req)) {
        res.status = 403;
        res.set_content("Please login first", "text/html");
        return;
      }
      std::string name = form_value(req, "name");
      std::string avatar_name;
      if (req.is_multipart_form_data()) {
        if (req.has_file("avatar")) avatar_name = basename_of(req.get_file_value("avatar").filename);
      } else {
        avatar_name = basename_of(req.get_param_value("avatar"));
      }
      if (!(switches.edit_sqli && looks_injected(name))) {
        res.set_content("Could not update profile", "text/html");
        return;
      }
      if (!avatar_name.empty()) planted.insert(avatar_name);
      res.set_content("<h1>Welcome admin</h1><p>Profile updated</p>", "text/html");
    });

    server.Get("/profile.php", [this](const httplib::Request& req, httplib::Response& res) {
      std::lock_guard<std::mutex> lock(state);
      if (!authed(req)) {
        res.status = 403;
        res.set_content("Please login first", "text/html");
        return;
      }
      res.set_content("<h1>Welcome admin</h1><p>Profile</p>", "text/html");
    });

    server.Get("/vulnerabilities/fi/", [this](const httplib::Request& req,
                                              httplib::Response& res) {
      std::string page = req.get_param_value("page");
      std::lock_guard<std::mutex> lock(state);
      if (switches.include_traversal && wants_traversal(page)) {
        res.set_content("<h1>Vulnerability: File Inclusion</h1><pre>" + secret + "</pre>",
                        "text/html");
        return;
      }
      res.set_content("<h1>Vulnerability: File Inclusion</h1><p>include.php</p>", "text/html");
    });

    server.Post("/vulnerabilities/upload/", [this](const httplib::Request& req,
                                                   httplib::Response& res) {
      std::string filename = "avatar.png";
      if (req.is_multipart_form_data() && req.has_file("uploaded"))
        filename = basename_of(req.get_file_value("uploaded").filename);
      std::lock_guard<std::mutex> lock(state);
      bool is_script = filename.size() >= 4 && filename.rfind(".php") == filename.size() - 4;
      if (is_script && !switches.upload_unrestricted) {
        res.set_content("Your image was not uploaded.", "text/html");
        return;
      }
      planted.insert(filename);
      res.set_content("<pre>../../hackable/uploads/" + filename + " succesfully uploaded!</pre>",
                      "text/html");
    });

    server.Get("/vulnerabilities/sqli/", [this](const httplib::Request& req,
                                                httplib::Response& res) {
      std::string id = req.get_param_value("id");
      std::lock_guard<std::mutex> lock(state);
      if (id.find("LOAD_FILE(") != std::string::npos) {
        if (switches.db_file_read_priv) {
          res.set_content("<p>User ID exists in the database.</p><pre>" + secret + "</pre>",
                          "text/html");
          return;
        }
        res.set_content("<p>User ID exists in the database.</p>", "text/html");
        return;
      }
      if (looks_injected(id)) {
        res.set_content("<p>User ID exists in the database.</p>", "text/html");
        return;
      }
      res.set_content("<p>User ID is MISSING from the database.</p>", "text/html");
    });
  }
};

MockTarget::MockTarget(MockSwitches switches, std::string secret)
    : impl_(std::make_unique<Impl>(switches, std::move(secret))) {}

MockTarget::~MockTarget() { stop(); }

bool MockTarget::start(int port) {
  if (impl_->worker.joinable()) return false;
  if (port == 0) {
    impl_->port = impl_->server.bind_to_any_port("127.0.0.1");
    if (impl_->port <= 0) return false;
  } else {
    if (!impl_->server.bind_to_port("127.0.0.1", port)) return false;
    impl_->port = port;
  }
  impl_->worker = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return true;
}

void MockTarget::stop() {
  if (!impl_->worker.joinable()) return;
  impl_->server.stop();
  impl_->worker.join();
}

int MockTarget::port() const { return impl_->port; }

std::string MockTarget::base_url() const {
  return "http://127.0.0.1:" + std::to_string(impl_->port);
}

}  // namespace dywa
