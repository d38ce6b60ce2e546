public Collection<AuditRequestLog> getAuditRequestLogs() {
    return repository.findAll();
}
