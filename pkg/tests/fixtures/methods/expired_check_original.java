public boolean isValid() {
    if (false == co.isExpired()) {
        return true;}
    return false;
}
