package com.golf.maps;

import java.security.MessageDigest;
import javax.crypto.Cipher;

public class TileCache {
    private static final String MODE = "/CBC";
    private static final String TRANSFORM = "AES" + MODE + "/PKCS5Padding";

    private final String configured;

    public TileCache(String configured) {
        this.configured = configured;
    }

    public MessageDigest fromCaller(String alg) throws Exception {
        return MessageDigest.getInstance(alg); //@ kind=DigestFactory value=?
    }

    public MessageDigest fromField() throws Exception {
        return MessageDigest.getInstance(configured); //@ kind=DigestFactory value=?
    }

    public MessageDigest branchy(boolean fast) throws Exception {
        String name;
        if (fast) {
            name = "MD5";
        } else {
            name = "SHA-256";
        }
        return MessageDigest.getInstance(name); //@ kind=DigestFactory value=?
    }

    public MessageDigest reassigned() throws Exception {
        String name = "MD5";
        name = name.toLowerCase();
        return MessageDigest.getInstance(name); //@ kind=DigestFactory value=?
    }

    public Cipher composed() throws Exception {
        return Cipher.getInstance(TRANSFORM); //@ kind=CipherFactory value=AES/CBC/PKCS5Padding via=dataflow label=ConditionallySafe
    }

    public Cipher shared() throws Exception {
        return Cipher.getInstance(Defaults.ALGORITHM); //@ kind=CipherFactory value=AES/CTR/NoPadding via=dataflow label=ConditionallySafe
    }

    public Cipher ambiguous() throws Exception {
        return Cipher.getInstance(ALGORITHM); //@ kind=CipherFactory value=?
    }
}
