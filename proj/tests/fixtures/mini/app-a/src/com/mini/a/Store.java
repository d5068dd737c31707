package com.mini.a;

import java.security.MessageDigest;
import javax.crypto.Cipher;

public class Store {
    MessageDigest etag() throws Exception {
        return MessageDigest.getInstance("MD5");
    }

    MessageDigest legacyEtag() throws Exception {
        return MessageDigest.getInstance("MD5");
    }

    MessageDigest content() throws Exception {
        return MessageDigest.getInstance("SHA-256");
    }

    Cipher box() throws Exception {
        return Cipher.getInstance("AES/CBC/PKCS5Padding");
    }
}
