public String create() {
    return UUID.randomUUID().toString();
}
