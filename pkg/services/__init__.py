# Background services for the HTTP API
